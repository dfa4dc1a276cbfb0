//! Per-drop performance indicators and their Monte-Carlo aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::solvers::{AllocationMatrix, Algorithm};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerMode {
    Uniform,
    Dpra,
}

impl PowerMode {
    pub fn label(self) -> &'static str {
        match self {
            PowerMode::Uniform => "uniform",
            PowerMode::Dpra => "dpra",
        }
    }
}

impl std::str::FromStr for PowerMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(PowerMode::Uniform),
            "dpra" => Ok(PowerMode::Dpra),
            other => Err(crate::Error::Config(format!("unknown power mode `{other}` (expected uniform or dpra)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellResult {
    pub served: usize,
    pub dropped: usize,
    /// PRB count of every served user.
    pub prb_counts: Vec<usize>,
}

impl CellResult {
    pub fn from_allocation(allocation: &AllocationMatrix) -> Self {
        Self {
            served: allocation.satisfied.len(),
            dropped: allocation.dropped.len(),
            prb_counts: allocation.satisfied.iter().map(|u| allocation.assignment[u].len()).collect(),
        }
    }
}

/// Outcome of one configuration on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub algorithm: Algorithm,
    pub power_mode: PowerMode,
    pub max_prbs: usize,
    pub users_per_cell: usize,
    pub ipp_iterations: usize,
    pub seed: u64,
    pub cells: Vec<CellResult>,
    pub total_power_w: f64,
}

impl DropResult {
    pub fn dropped_total(&self) -> usize {
        self.cells.iter().map(|c| c.dropped).sum()
    }

    pub fn dropped_per_cell(&self) -> f64 {
        self.dropped_total() as f64 / self.cells.len() as f64
    }
}

/// Average PRBs per satisfied user: the per-cell mean over satisfied users,
/// averaged over cells. Cells without satisfied users are left out; `None`
/// when no cell serves anyone.
pub fn eta(result: &DropResult) -> Option<f64> {
    let per_cell: Vec<f64> = result
        .cells
        .iter()
        .filter(|c| !c.prb_counts.is_empty())
        .map(|c| c.prb_counts.iter().sum::<usize>() as f64 / c.prb_counts.len() as f64)
        .collect();
    let skipped = result.cells.len() - per_cell.len();
    if skipped > 0 {
        log::debug!("eta: {skipped} cell(s) without satisfied users left out (seed {})", result.seed);
    }
    (!per_cell.is_empty()).then(|| per_cell.iter().sum::<f64>() / per_cell.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Half-width of the 95% normal-approximation interval; `None` below two samples.
    pub ci95: Option<f64>,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        let n = samples.len();
        if n == 0 {
            return None;
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ci95 = (n >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z_95 * (var / n as f64).sqrt()
        });
        Some(Self { mean, ci95, samples: n })
    }

    pub fn interval(&self) -> (f64, f64) {
        let h = self.ci95.unwrap_or(0.0);
        (self.mean - h, self.mean + h)
    }

    /// True when the two 95% intervals do not overlap.
    pub fn separated_from(&self, other: &Estimate) -> bool {
        let (a_lo, a_hi) = self.interval();
        let (b_lo, b_hi) = other.interval();
        a_hi < b_lo || b_hi < a_lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigKey {
    pub algorithm: Algorithm,
    pub power_mode: PowerMode,
    pub max_prbs: usize,
    pub users_per_cell: usize,
    pub ipp_iterations: usize,
}

impl ConfigKey {
    pub fn of(result: &DropResult) -> Self {
        Self {
            algorithm: result.algorithm,
            power_mode: result.power_mode,
            max_prbs: result.max_prbs,
            users_per_cell: result.users_per_cell,
            ipp_iterations: result.ipp_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub key: ConfigKey,
    pub drops: usize,
    /// Dropped users per cell.
    pub dropped: Estimate,
    /// Over drops where it is defined.
    pub eta: Option<Estimate>,
    pub total_power_w: f64,
}

/// Groups results by configuration, keeping the order in which each
/// configuration first appears.
pub fn aggregate(results: &[DropResult]) -> Vec<SummaryRow> {
    let mut order: Vec<ConfigKey> = Vec::new();
    let mut groups: BTreeMap<ConfigKey, Vec<&DropResult>> = BTreeMap::new();
    for r in results {
        let key = ConfigKey::of(r);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let dropped: Vec<f64> = group.iter().map(|r| r.dropped_per_cell()).collect();
            let etas: Vec<f64> = group.iter().filter_map(|r| eta(r)).collect();
            SummaryRow {
                key,
                drops: group.len(),
                dropped: Estimate::from_samples(&dropped).expect("group is non-empty"),
                eta: Estimate::from_samples(&etas),
                total_power_w: group.iter().map(|r| r.total_power_w).sum::<f64>() / group.len() as f64,
            }
        })
        .collect()
}
