//! Self-checks behind the `verify` subcommand: the hand-built toy instance,
//! the MWDG approximation bound against the exact solver, the power-shave
//! round trip and allocation feasibility on simulated drops.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::shannon_rate;
use crate::graph::{build_graph, meets_target, AllocGraph, AllocationSetFamily};
use crate::harness::{simulate_drop, DropRecord, ScenarioConfig};
use crate::metrics::PowerMode;
use crate::power::{delta_power, shaved_power};
use crate::rng::{substream, Purpose};
use crate::solvers::{approximation_ratio, exact_mwis, mwdg, EXACT_MWIS_DEFAULT_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Three users, four PRBs (ids 0-based):
/// `u0: {0},{1},{3}`, `u1: {0},{1,2},{1,3}`, `u2: {0},{1,2},{3}`.
pub fn toy_graph() -> AllocGraph {
    let fam = |u, sets: Vec<Vec<usize>>| AllocationSetFamily::from_sets(u, sets);
    build_graph(
        &[
            fam(0, vec![vec![0], vec![1], vec![3]]),
            fam(1, vec![vec![0], vec![1, 2], vec![1, 3]]),
            fam(2, vec![vec![0], vec![1, 2], vec![3]]),
        ],
        4,
    )
}

pub fn check_toy_example() -> Check {
    let g = toy_graph();
    let weights: Vec<u64> = g.vertices().iter().map(|v| v.weight).collect();
    let min = (0..g.num_vertices()).map(|v| g.weighted_degree(v)).min();
    let argmin: Vec<usize> = (0..g.num_vertices()).filter(|&v| Some(g.weighted_degree(v)) == min).collect();
    let (alloc, trace) = mwdg(&g);
    let assigned: Vec<(usize, Vec<usize>)> = trace.selected().iter().map(|&v| (g.vertex(v).owner, g.vertex(v).prbs.clone())).collect();
    let passed = weights == [3, 3, 3, 3, 2, 2, 3, 2, 3]
        && argmin == [3, 8]
        && min.map(|d| (d.numerator, d.denominator)) == Some((10, 3))
        && assigned == [(1, vec![0]), (0, vec![1]), (2, vec![3])]
        && alloc.dropped.is_empty();
    Check {
        name: "toy example".into(),
        passed,
        detail: format!("weights {weights:?}, argmin {argmin:?}, selections {assigned:?}"),
    }
}

/// A random allocation graph built from real minimal-set enumeration:
/// 4-10 PRBs, 2-6 users, `M = 1 + index % 3`, at most `cap` vertices.
pub fn random_instance(seed: u64, index: usize, cap: usize) -> (AllocGraph, usize) {
    let max_prbs = 1 + index % 3;
    for attempt in 0.. {
        let mut rng = substream(seed, Purpose::Instance, 0, index, attempt);
        let num_prbs = rng.random_range(4..=10);
        let users = rng.random_range(2..=6);
        let families: Vec<_> = (0..users)
            .map(|u| {
                let rates: Vec<f64> =
                    (0..num_prbs).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..1.0) }).collect();
                let target = rng.random_range(0.3..0.9) * max_prbs as f64;
                AllocationSetFamily::enumerate(u, &rates, target, max_prbs)
            })
            .collect();
        let g = build_graph(&families, num_prbs);
        if g.num_vertices() > 0 && g.num_vertices() <= cap {
            return (g, max_prbs);
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub instances: usize,
    /// Instances with M >= 2 where MWDG fell short of `W_opt / ρ`.
    pub violations: usize,
    /// Smallest `W_mwdg / W_opt` seen for M = 1, 2, 3.
    pub worst_quality: [f64; 3],
    /// M = 1 instances where MWDG missed the optimum; not counted as violations.
    pub m1_suboptimal: usize,
}

pub fn check_approximation_bound(instances: usize, seed: u64) -> Result<BoundReport> {
    let mut report = BoundReport { instances, violations: 0, worst_quality: [1.0; 3], m1_suboptimal: 0 };
    for index in 0..instances {
        let (g, m) = random_instance(seed, index, EXACT_MWIS_DEFAULT_CAP);
        let exact = exact_mwis(&g, EXACT_MWIS_DEFAULT_CAP)?;
        let (_, trace) = mwdg(&g);
        let greedy = g.total_weight(&trace.selected());
        let rho = approximation_ratio(m, g.num_prbs())?;
        let quality = greedy as f64 / exact.weight as f64;
        report.worst_quality[m - 1] = report.worst_quality[m - 1].min(quality);
        if m == 1 {
            // The ratio bound collapses to optimality here; shortfalls are
            // reported, not counted.
            if greedy < exact.weight {
                report.m1_suboptimal += 1;
                log::warn!("M=1 instance {index}: MWDG weight {greedy} below optimum {}", exact.weight);
            }
        } else if (greedy as f64) * rho < exact.weight as f64 {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// Largest relative error of `rate - excess` after shaving, over random tuples.
pub fn check_shave_round_trip(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let bandwidth = 10f64.powf(rng.random_range(0.0..6.0));
        let rate = bandwidth * rng.random_range(0.01..12.0);
        let excess = rate * rng.random_range(0.0..1.0);
        if !(excess > 0.0 && excess < rate) {
            continue;
        }
        let interference = 10f64.powf(rng.random_range(-15.0..-9.0));
        let noise = 10f64.powf(rng.random_range(-15.0..-12.0));
        let gain = 10f64.powf(rng.random_range(-14.0..-8.0));
        if delta_power(rate, excess, interference, noise, gain, bandwidth).is_err() {
            return f64::INFINITY;
        }
        let q = shaved_power(rate, excess, interference, noise, gain, bandwidth);
        let achieved = shannon_rate(bandwidth, q, gain, interference, noise);
        worst = worst.max((achieved - (rate - excess)).abs() / (rate - excess));
    }
    worst
}

/// Constraint violations of every evaluation of a drop: PRB exclusivity, the
/// per-user cap and target attainment under the allocation rates; for DPRA
/// runs also per-PRB power monotonicity across rounds, shrinking PRB sets and
/// target attainment under the final power map.
pub fn drop_violations(record: &DropRecord, max_prbs: usize) -> Vec<String> {
    let targets = record.deployment.targets();
    let mut out = Vec::new();
    for e in &record.evaluations {
        let tag = format!("drop {} {} {} J={}", record.drop_index, e.algorithm, e.power_mode.label(), e.ipp_iteration);
        for a in &e.initial_allocations {
            out.extend(a.violations(&e.allocation_rates, &targets, max_prbs).into_iter().map(|v| format!("{tag}: {v}")));
        }
        if e.power_mode == PowerMode::Dpra {
            let final_rates = record.deployment.rates(&e.powers);
            for (before, after) in e.initial_allocations.iter().zip(&e.allocations) {
                out.extend(after.violations(&final_rates, &targets, max_prbs).into_iter().map(|v| format!("{tag} after DPRA: {v}")));
                for (u, prbs) in &after.assignment {
                    if !before.assignment.get(u).is_some_and(|b| prbs.iter().all(|n| b.contains(n))) {
                        out.push(format!("{tag}: user {u} gained PRBs during DPRA"));
                    }
                }
                if after.satisfied != before.satisfied {
                    out.push(format!("{tag}: DPRA changed the served set"));
                }
            }
            for u in e.allocations.iter().flat_map(|a| a.satisfied.iter()) {
                let prbs = &e.allocations.iter().find(|a| a.satisfied.contains(u)).unwrap().assignment[u];
                let sum: f64 = prbs.iter().map(|&n| final_rates.rate(*u, n)).sum();
                if !meets_target(sum, targets[*u]) {
                    out.push(format!("{tag}: user {u} below target after DPRA ({sum})"));
                }
            }
            if let Some(d) = &e.dpra {
                if !d.trace.windows(2).all(|w| w[1].total_power_w <= w[0].total_power_w) {
                    out.push(format!("{tag}: total power increased between rounds"));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub instances: usize,
    pub shave_samples: usize,
    pub feasibility_drops: usize,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let config = ScenarioConfig {
            users_per_cell: vec![28],
            algorithm: crate::solvers::Algorithm::ALL.to_vec(),
            power_mode: vec![PowerMode::Uniform, PowerMode::Dpra],
            ipp_iterations: vec![1, 2],
            ..ScenarioConfig::default()
        };
        Self { instances: 1000, shave_samples: 10_000, feasibility_drops: 10, seed: 2024, config }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub bound: BoundReport,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(options: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = vec![check_toy_example()];

    let bound = check_approximation_bound(options.instances, options.seed)?;
    checks.push(Check {
        name: "approximation bound".into(),
        passed: bound.violations == 0,
        detail: format!(
            "{} instances, {} violations; worst W_mwdg/W_opt by M: {:.4} {:.4} {:.4}; M=1 suboptimal on {}",
            bound.instances, bound.violations, bound.worst_quality[0], bound.worst_quality[1], bound.worst_quality[2], bound.m1_suboptimal
        ),
    });

    let worst = check_shave_round_trip(options.shave_samples, options.seed);
    checks.push(Check {
        name: "power shave round trip".into(),
        passed: worst <= 1e-12,
        detail: format!("{} samples, worst relative error {worst:.3e}", options.shave_samples),
    });

    let config = &options.config;
    let mut violations = Vec::new();
    for &n in &config.users_per_cell {
        for d in 0..options.feasibility_drops {
            violations.extend(drop_violations(&simulate_drop(config, n, d)?, config.max_prbs));
        }
    }
    checks.push(Check {
        name: "allocation feasibility".into(),
        passed: violations.is_empty(),
        detail: if violations.is_empty() {
            format!("{} drops clean", options.feasibility_drops * config.users_per_cell.len())
        } else {
            format!("{} violations, first: {}", violations.len(), violations[0])
        },
    });
    Ok(VerificationReport { checks, bound })
}
