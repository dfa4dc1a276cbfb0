//! Distributed power reassignment (DPRA) and the iterative PRB-and-power
//! (IPP) loop.
//!
//! Starting from the power map an allocation was computed under, every cell
//! zeroes its unused PRBs, frees PRBs a user no longer needs and shaves power
//! on one PRB per user so the user's rate lands exactly on its target. Cells
//! run in synchronous rounds against the previous round's global powers; the
//! lower interference this produces is what lets later rounds free PRBs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{Deployment, PowerMap, RateTable};
use crate::solvers::{allocate_network, AllocationMatrix, Algorithm};

/// Power reduction that lowers a PRB's rate from `rate` by `excess_rate`
/// under fixed interference: `2^{r/B} (1 − 2^{−Δr/B}) (I + σ²) / h`.
pub fn delta_power(
    rate: f64,
    excess_rate: f64,
    interference: f64,
    noise: f64,
    gain: f64,
    bandwidth: f64,
) -> Result<f64> {
    if !(excess_rate >= 0.0 && excess_rate < rate) {
        return Err(Error::Contract(format!("shave needs 0 <= excess ({excess_rate}) < rate ({rate})")));
    }
    let ln2 = std::f64::consts::LN_2;
    let grow = (rate / bandwidth * ln2).exp();
    let shrink = -(-excess_rate / bandwidth * ln2).exp_m1();
    Ok(grow * shrink * (interference + noise) / gain)
}

/// Power that delivers exactly `rate - excess_rate`, i.e. the current power
/// minus [`delta_power`], evaluated without the cancellation of that
/// subtraction.
pub fn shaved_power(
    rate: f64,
    excess_rate: f64,
    interference: f64,
    noise: f64,
    gain: f64,
    bandwidth: f64,
) -> f64 {
    let remaining = (rate - excess_rate).max(0.0);
    (remaining / bandwidth * std::f64::consts::LN_2).exp_m1() * (interference + noise) / gain
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shave {
    pub user: usize,
    pub prb: usize,
    /// Watts removed, never more than the PRB carried.
    pub delta_power: f64,
}

/// What one cell did in one DPRA round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DpraCellStep {
    pub cell: usize,
    /// PRBs whose power was set to zero, ascending.
    pub freed_prbs: Vec<usize>,
    pub shaved: Vec<Shave>,
    /// Excess rate of each served user after freeing PRBs, before the shave.
    pub excess_rate: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellUpdate {
    /// New per-PRB powers of the cell.
    pub powers: Vec<f64>,
    pub allocation: AllocationMatrix,
    pub step: DpraCellStep,
}

/// One DPRA step of `cell` against the global snapshot (`rates`, `powers`).
pub fn dpra_cell(
    deployment: &Deployment,
    cell: usize,
    allocation: &AllocationMatrix,
    rates: &RateTable,
    powers: &PowerMap,
) -> Result<CellUpdate> {
    let bandwidth = deployment.topology.prb_bandwidth;
    let noise = deployment.channel.noise_power;
    let mut cell_powers = powers.cell(cell).to_vec();
    let mut allocation = allocation.clone();
    let mut step = DpraCellStep { cell, ..Default::default() };

    for n in allocation.unallocated_prbs() {
        if cell_powers[n] > 0.0 {
            cell_powers[n] = 0.0;
            step.freed_prbs.push(n);
        }
    }

    for (&user, prbs) in allocation.assignment.iter_mut() {
        let target = deployment.population.users[user].target_rate;
        let mut excess = (prbs.iter().map(|&n| rates.rate(user, n)).sum::<f64>() - target).max(0.0);

        loop {
            let Some(&weakest) = prbs.iter().min_by(|&&a, &&b| rates.rate(user, a).total_cmp(&rates.rate(user, b)).then(a.cmp(&b)))
            else {
                break;
            };
            let r = rates.rate(user, weakest);
            if r > excess || prbs.len() == 1 {
                break;
            }
            prbs.retain(|&n| n != weakest);
            cell_powers[weakest] = 0.0;
            step.freed_prbs.push(weakest);
            excess -= r;
        }
        step.excess_rate.insert(user, excess);
        if excess <= 0.0 {
            continue;
        }

        let mut best: Option<(f64, usize)> = None;
        for &n in prbs.iter() {
            let dp = delta_power(
                rates.rate(user, n),
                excess,
                rates.interference(user, n),
                noise,
                deployment.channel.gain(user, n, cell),
                bandwidth,
            )?;
            if best.is_none_or(|(b, _)| dp > b) {
                best = Some((dp, n));
            }
        }
        if let Some((_, n)) = best {
            let target_power = shaved_power(
                rates.rate(user, n),
                excess,
                rates.interference(user, n),
                noise,
                deployment.channel.gain(user, n, cell),
                bandwidth,
            );
            let new_power = target_power.clamp(0.0, cell_powers[n]);
            step.shaved.push(Shave { user, prb: n, delta_power: cell_powers[n] - new_power });
            cell_powers[n] = new_power;
        }
    }
    step.freed_prbs.sort_unstable();
    Ok(CellUpdate { powers: cell_powers, allocation, step })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpraParams {
    pub max_rounds: usize,
    /// Rounds stop once no per-PRB power moves by this much (watts).
    pub epsilon_w: f64,
}

impl DpraParams {
    /// 50 rounds and a tolerance of `1e-6` of the uniform per-PRB power.
    pub fn for_deployment(deployment: &Deployment) -> Self {
        Self::relative(deployment, 50, 1e-6)
    }

    pub fn relative(deployment: &Deployment, max_rounds: usize, epsilon_rel: f64) -> Self {
        let t = &deployment.topology;
        let per_prb = t.total_power_per_cell.iter().copied().fold(0.0, f64::max) / t.num_prbs as f64;
        Self { max_rounds, epsilon_w: epsilon_rel * per_prb }
    }
}

/// One line of the round log.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub round: usize,
    pub total_power_w: f64,
    pub max_change_w: f64,
    pub load: Vec<usize>,
}

impl fmt::Display for RoundTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let load: Vec<String> = self.load.iter().map(usize::to_string).collect();
        write!(
            f,
            "round={} total_power_w={:.9e} max_change_w={:.9e} load={}",
            self.round,
            self.total_power_w,
            self.max_change_w,
            load.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpraOutcome {
    pub powers: PowerMap,
    pub allocations: Vec<AllocationMatrix>,
    pub rounds: usize,
    pub converged: bool,
    pub trace: Vec<RoundTrace>,
}

impl DpraOutcome {
    /// The round log, one [`RoundTrace`] per line.
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// Synchronous DPRA over all cells until the largest per-PRB change drops
/// below `params.epsilon_w` or `params.max_rounds` is reached.
pub fn dpra_network(
    deployment: &Deployment,
    allocations: &[AllocationMatrix],
    powers: &PowerMap,
    params: &DpraParams,
) -> Result<DpraOutcome> {
    let mut current = powers.clone();
    let mut allocations = allocations.to_vec();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut rounds = 0;
    while rounds < params.max_rounds {
        rounds += 1;
        let rates = deployment.rates(&current);
        let mut next = current.clone();
        for (cell, allocation) in allocations.iter_mut().enumerate() {
            let update = dpra_cell(deployment, cell, allocation, &rates, &current)?;
            next.cell_mut(cell).copy_from_slice(&update.powers);
            *allocation = update.allocation;
        }
        let max_change = next.max_change(&current);
        trace.push(RoundTrace {
            round: rounds,
            total_power_w: next.total(),
            max_change_w: max_change,
            load: allocations.iter().map(AllocationMatrix::load).collect(),
        });
        current = next;
        if max_change < params.epsilon_w {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("DPRA stopped after {rounds} rounds without converging");
    }
    Ok(DpraOutcome { powers: current, allocations, rounds, converged, trace })
}

/// One pass of the IPP loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IppIteration {
    pub iteration: usize,
    /// Rates the allocation of this pass was computed under.
    pub rates: RateTable,
    pub allocations: Vec<AllocationMatrix>,
    pub dpra: DpraOutcome,
}

/// Alternates allocation and DPRA `iterations` times. The first pass runs
/// under uniform power; each later pass re-evaluates rates under the previous
/// DPRA power map, so PRBs a cell switched off are unusable in that cell.
pub fn ipp(
    deployment: &Deployment,
    algorithm: Algorithm,
    max_prbs: usize,
    iterations: usize,
    params: &DpraParams,
    ordering_seed: u64,
) -> Result<Vec<IppIteration>> {
    if iterations == 0 {
        return Err(Error::Config("IPP needs at least one iteration".into()));
    }
    let mut powers = PowerMap::uniform(&deployment.topology);
    let mut out = Vec::with_capacity(iterations);
    for iteration in 1..=iterations {
        let rates = deployment.rates(&powers);
        let allocations = allocate_network(deployment, &rates, algorithm, max_prbs, ordering_seed, iteration);
        let dpra = dpra_network(deployment, &allocations, &powers, params)?;
        powers = dpra.powers.clone();
        out.push(IppIteration { iteration, rates, allocations, dpra });
    }
    Ok(out)
}
