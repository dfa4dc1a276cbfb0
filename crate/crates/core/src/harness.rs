//! Scenario configuration, the seeded Monte-Carlo runner and CSV output.

use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_hex_grid, dbm_to_watts, draw_channel, drop_users, thermal_noise_watts, ChannelModel, Deployment, PowerMap,
    RadioParams, RateTable,
};
use crate::metrics::{aggregate, CellResult, DropResult, PowerMode, SummaryRow};
use crate::power::{ipp, DpraOutcome, DpraParams};
use crate::rng::drop_seed;
use crate::solvers::{allocate_network, AllocationMatrix, Algorithm};

/// Simulation parameters. Every field has a default, so a config file only
/// lists what it changes. List-valued fields also accept a single value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_cells: usize,
    pub inter_site_distance_m: f64,
    pub system_bandwidth_hz: f64,
    pub num_prbs: usize,
    pub total_power_dbm: f64,
    pub pathloss_intercept_db: f64,
    pub pathloss_slope_db: f64,
    pub shadow_std_db: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    /// Overrides the thermal noise computed from density and noise figure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power_w: Option<f64>,
    pub target_rate_bps: f64,
    pub max_prbs: usize,
    #[serde(deserialize_with = "one_or_many")]
    pub users_per_cell: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub algorithm: Vec<Algorithm>,
    #[serde(deserialize_with = "one_or_many")]
    pub power_mode: Vec<PowerMode>,
    #[serde(deserialize_with = "one_or_many")]
    pub ipp_iterations: Vec<usize>,
    pub num_drops: usize,
    pub master_seed: u64,
    pub dpra_max_rounds: usize,
    pub dpra_epsilon_rel: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_cells: 7,
            inter_site_distance_m: 500.0,
            system_bandwidth_hz: 5e6,
            num_prbs: 24,
            total_power_dbm: 43.0,
            pathloss_intercept_db: 128.1,
            pathloss_slope_db: 37.6,
            shadow_std_db: 8.0,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            noise_power_w: None,
            target_rate_bps: 768e3,
            max_prbs: 2,
            users_per_cell: vec![8],
            algorithm: vec![Algorithm::Mwdg],
            power_mode: vec![PowerMode::Uniform],
            ipp_iterations: vec![1],
            num_drops: 200,
            master_seed: 1,
            dpra_max_rounds: 50,
            dpra_epsilon_rel: 1e-6,
        }
    }
}

fn one_or_many<'de, D, T>(deserializer: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(deserializer)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub drops: Option<usize>,
    pub algorithm: Option<Vec<Algorithm>>,
    pub users: Option<Vec<usize>>,
    pub max_prbs: Option<usize>,
    pub power_mode: Option<Vec<PowerMode>>,
    pub ipp: Option<Vec<usize>>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|message| Error::Parse { path: path.to_path_buf(), message })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.master_seed = v;
        }
        if let Some(v) = o.drops {
            self.num_drops = v;
        }
        if let Some(v) = &o.algorithm {
            self.algorithm = v.clone();
        }
        if let Some(v) = &o.users {
            self.users_per_cell = v.clone();
        }
        if let Some(v) = o.max_prbs {
            self.max_prbs = v;
        }
        if let Some(v) = &o.power_mode {
            self.power_mode = v.clone();
        }
        if let Some(v) = &o.ipp {
            self.ipp_iterations = v.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_cells != 1 && self.num_cells != 7 {
            return fail(format!("num_cells must be 1 or 7, got {}", self.num_cells));
        }
        if self.num_prbs < 2 {
            return fail(format!("num_prbs must be at least 2, got {}", self.num_prbs));
        }
        if self.max_prbs < 1 || self.max_prbs >= self.num_prbs {
            return fail(format!("max_prbs must satisfy 1 <= M < num_prbs ({}), got {}", self.num_prbs, self.max_prbs));
        }
        for (name, v) in [
            ("inter_site_distance_m", self.inter_site_distance_m),
            ("system_bandwidth_hz", self.system_bandwidth_hz),
            ("target_rate_bps", self.target_rate_bps),
            ("dpra_epsilon_rel", self.dpra_epsilon_rel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.shadow_std_db >= 0.0) {
            return fail(format!("shadow_std_db must be non-negative, got {}", self.shadow_std_db));
        }
        if let Some(n) = self.noise_power_w {
            if !(n > 0.0 && n.is_finite()) {
                return fail(format!("noise_power_w must be positive, got {n}"));
            }
        }
        if self.num_drops == 0 {
            return fail("num_drops must be at least 1".into());
        }
        if self.dpra_max_rounds == 0 {
            return fail("dpra_max_rounds must be at least 1".into());
        }
        if self.users_per_cell.is_empty() || self.users_per_cell.iter().any(|&n| n == 0 || n >= 1 << 24) {
            return fail(format!("users_per_cell entries must be in 1..2^24, got {:?}", self.users_per_cell));
        }
        if self.algorithm.is_empty() || self.power_mode.is_empty() || self.ipp_iterations.is_empty() {
            return fail("algorithm, power_mode and ipp_iterations need at least one value".into());
        }
        if self.ipp_iterations.contains(&0) {
            return fail("ipp_iterations entries must be at least 1".into());
        }
        if self.ipp_iterations.iter().any(|&j| j > 1) && !self.power_mode.contains(&PowerMode::Dpra) {
            return fail("ipp_iterations > 1 needs power_mode dpra (each pass reuses the DPRA power map)".into());
        }
        Ok(())
    }

    pub fn radio(&self) -> RadioParams {
        RadioParams {
            total_power_w: dbm_to_watts(self.total_power_dbm),
            num_prbs: self.num_prbs,
            system_bandwidth_hz: self.system_bandwidth_hz,
        }
    }

    pub fn prb_bandwidth(&self) -> f64 {
        self.system_bandwidth_hz / self.num_prbs as f64
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power_w.unwrap_or_else(|| {
            thermal_noise_watts(self.noise_density_dbm_hz, self.noise_figure_db, self.prb_bandwidth())
        })
    }

    pub fn channel_model(&self) -> ChannelModel {
        ChannelModel {
            pathloss_intercept_db: self.pathloss_intercept_db,
            pathloss_slope_db: self.pathloss_slope_db,
            shadow_std_db: self.shadow_std_db,
            noise_power_w: self.noise_power(),
        }
    }

    /// Topology, users and channel of one drop.
    pub fn deployment(&self, users_per_cell: usize, seed: u64) -> Result<Deployment> {
        let topology = build_hex_grid(self.inter_site_distance_m, self.num_cells, &self.radio())?;
        let population = drop_users(&topology, users_per_cell, self.target_rate_bps, seed);
        let channel = draw_channel(&topology, &population, &self.channel_model(), seed);
        Ok(Deployment { topology, population, channel })
    }

    /// IPP depths to report, ascending and de-duplicated.
    fn ipp_depths(&self) -> Vec<usize> {
        let mut j = self.ipp_iterations.clone();
        j.sort_unstable();
        j.dedup();
        j
    }
}

/// One configuration evaluated on one drop, with the state behind its
/// metrics kept for inspection.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub algorithm: Algorithm,
    pub power_mode: PowerMode,
    pub ipp_iteration: usize,
    /// Rates the allocation was computed under.
    pub allocation_rates: RateTable,
    /// Allocation as produced by the solver, before any DPRA.
    pub initial_allocations: Vec<AllocationMatrix>,
    /// Final allocation (after DPRA when it ran).
    pub allocations: Vec<AllocationMatrix>,
    pub powers: PowerMap,
    pub dpra: Option<DpraOutcome>,
    pub result: DropResult,
}

#[derive(Debug, Clone)]
pub struct DropRecord {
    pub drop_index: usize,
    pub seed: u64,
    pub deployment: Deployment,
    pub evaluations: Vec<Evaluation>,
}

/// Runs every configured (algorithm, power mode, IPP depth) on drop
/// `drop_index` with `users_per_cell` users per cell. All configurations share
/// the same deployment.
pub fn simulate_drop(config: &ScenarioConfig, users_per_cell: usize, drop_index: usize) -> Result<DropRecord> {
    let seed = drop_seed(config.master_seed, drop_index);
    let deployment = config.deployment(users_per_cell, seed)?;
    let uniform = PowerMap::uniform(&deployment.topology);
    let params = DpraParams::relative(&deployment, config.dpra_max_rounds, config.dpra_epsilon_rel);
    let depths = config.ipp_depths();
    let deepest = if config.power_mode.contains(&PowerMode::Dpra) { *depths.last().unwrap() } else { 0 };

    let make_result = |algorithm, power_mode, j, allocations: &[AllocationMatrix], powers: &PowerMap| DropResult {
        algorithm,
        power_mode,
        max_prbs: config.max_prbs,
        users_per_cell,
        ipp_iterations: j,
        seed,
        cells: allocations.iter().map(CellResult::from_allocation).collect(),
        total_power_w: powers.total(),
    };

    let mut evaluations = Vec::new();
    for &algorithm in &config.algorithm {
        let passes = if deepest > 0 {
            ipp(&deployment, algorithm, config.max_prbs, deepest, &params, seed)?
        } else {
            Vec::new()
        };
        if config.power_mode.contains(&PowerMode::Uniform) {
            let (rates, allocations) = match passes.first() {
                Some(first) => (first.rates.clone(), first.allocations.clone()),
                None => {
                    let rates = deployment.rates(&uniform);
                    let a = allocate_network(&deployment, &rates, algorithm, config.max_prbs, seed, 1);
                    (rates, a)
                }
            };
            evaluations.push(Evaluation {
                algorithm,
                power_mode: PowerMode::Uniform,
                ipp_iteration: 1,
                result: make_result(algorithm, PowerMode::Uniform, 1, &allocations, &uniform),
                allocation_rates: rates,
                initial_allocations: allocations.clone(),
                allocations,
                powers: uniform.clone(),
                dpra: None,
            });
        }
        for pass in passes.into_iter().filter(|p| depths.contains(&p.iteration)) {
            evaluations.push(Evaluation {
                algorithm,
                power_mode: PowerMode::Dpra,
                ipp_iteration: pass.iteration,
                result: make_result(algorithm, PowerMode::Dpra, pass.iteration, &pass.dpra.allocations, &pass.dpra.powers),
                allocation_rates: pass.rates,
                initial_allocations: pass.allocations,
                allocations: pass.dpra.allocations.clone(),
                powers: pass.dpra.powers.clone(),
                dpra: Some(pass.dpra),
            });
        }
    }
    Ok(DropRecord { drop_index, seed, deployment, evaluations })
}

/// Per-drop results of every configuration, ordered by users-per-cell entry,
/// then drop index, then configuration.
pub fn run_drops(config: &ScenarioConfig) -> Result<Vec<DropResult>> {
    config.validate()?;
    let mut out = Vec::new();
    for &n in &config.users_per_cell {
        let per_drop: Vec<Vec<DropResult>> = (0..config.num_drops)
            .into_par_iter()
            .map(|d| simulate_drop(config, n, d).map(|rec| rec.evaluations.into_iter().map(|e| e.result).collect()))
            .collect::<Result<_>>()?;
        out.extend(per_drop.into_iter().flatten());
    }
    Ok(out)
}

/// Runs the whole scenario and summarizes it, one row per
/// (users per cell, algorithm, power mode, IPP depth).
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<SummaryRow>> {
    Ok(aggregate(&run_drops(config)?))
}

pub const CSV_HEADER: [&str; 11] = [
    "algorithm",
    "power_mode",
    "M",
    "N",
    "J",
    "drops",
    "mean_dropped",
    "ci_dropped",
    "mean_eta",
    "ci_eta",
    "mean_total_power_w",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_results<W: io::Write>(rows: &[SummaryRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.key.algorithm.label().to_string(),
            row.key.power_mode.label().to_string(),
            row.key.max_prbs.to_string(),
            row.key.users_per_cell.to_string(),
            row.key.ipp_iterations.to_string(),
            row.drops.to_string(),
            format!("{:.6}", row.dropped.mean),
            fmt_opt(row.dropped.ci95),
            fmt_opt(row.eta.map(|e| e.mean)),
            fmt_opt(row.eta.and_then(|e| e.ci95)),
            format!("{:.6}", row.total_power_w),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Writes the summary as CSV to `path`.
pub fn emit_results(rows: &[SummaryRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Domain("refusing to write an empty results table".into()));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_results(rows, io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
