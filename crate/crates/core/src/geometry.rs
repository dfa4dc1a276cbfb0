//! Cell layout, user placement, channel draws and per-PRB Shannon rates.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

/// Distances below this are clamped before evaluating the pathloss.
pub const MIN_LINK_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Thermal noise over `bandwidth_hz` for a receiver with the given noise figure.
pub fn thermal_noise_watts(density_dbm_per_hz: f64, noise_figure_db: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(density_dbm_per_hz + noise_figure_db + 10.0 * bandwidth_hz.log10())
}

/// Power budget and PRB grid shared by every cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub total_power_w: f64,
    pub num_prbs: usize,
    pub system_bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellTopology {
    /// Base-station positions; the cell id is the index.
    pub cells: Vec<Position>,
    pub inter_site_distance: f64,
    pub total_power_per_cell: Vec<f64>,
    pub num_prbs: usize,
    pub system_bandwidth: f64,
    pub prb_bandwidth: f64,
}

/// Builds the 1- or 7-cell hexagonal layout: a center cell at the origin and,
/// for seven cells, six neighbors at angles `k * 60°`.
pub fn build_hex_grid(inter_site_distance: f64, num_cells: usize, radio: &RadioParams) -> Result<CellTopology> {
    if !(inter_site_distance > 0.0 && inter_site_distance.is_finite()) {
        return Err(Error::Config(format!("inter-site distance must be positive, got {inter_site_distance}")));
    }
    if radio.num_prbs == 0 {
        return Err(Error::Config("at least one PRB is required".into()));
    }
    if !(radio.total_power_w > 0.0) || !(radio.system_bandwidth_hz > 0.0) {
        return Err(Error::Config("cell power and system bandwidth must be positive".into()));
    }
    let mut cells = vec![Position::new(0.0, 0.0)];
    match num_cells {
        1 => {}
        7 => cells.extend((0..6).map(|k| {
            let angle = (k as f64 * 60.0).to_radians();
            Position::new(inter_site_distance * angle.cos(), inter_site_distance * angle.sin())
        })),
        n => return Err(Error::Config(format!("unsupported number of cells {n} (expected 1 or 7)"))),
    }
    Ok(CellTopology {
        total_power_per_cell: vec![radio.total_power_w; cells.len()],
        cells,
        inter_site_distance,
        num_prbs: radio.num_prbs,
        system_bandwidth: radio.system_bandwidth_hz,
        prb_bandwidth: radio.system_bandwidth_hz / radio.num_prbs as f64,
    })
}

impl CellTopology {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Circumradius of a cell hexagon.
    pub fn cell_radius(&self) -> f64 {
        self.inter_site_distance / 3f64.sqrt()
    }

    /// Whether `p` lies inside the hexagon of `cell`. The hexagon sides face
    /// the six neighbors, i.e. its apothem is half the inter-site distance.
    pub fn contains(&self, cell: usize, p: &Position) -> bool {
        let c = self.cells[cell];
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        let apothem = self.inter_site_distance / 2.0;
        (0..3).all(|k| {
            let a = (k as f64 * 60.0).to_radians();
            (dx * a.cos() + dy * a.sin()).abs() <= apothem
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub id: usize,
    pub cell: usize,
    /// Rank inside the serving cell; used to key random substreams.
    pub index_in_cell: usize,
    pub position: Position,
    pub target_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserPopulation {
    /// Cell-major: all users of cell 0 first, then cell 1, and so on.
    pub users: Vec<User>,
}

impl UserPopulation {
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn users_of(&self, cell: usize) -> impl Iterator<Item = &User> + '_ {
        self.users.iter().filter(move |u| u.cell == cell)
    }

    pub fn targets(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.target_rate).collect()
    }
}

/// Drops `users_per_cell` users uniformly inside every hexagon by rejection
/// sampling. Each user has its own placement substream.
pub fn drop_users(topology: &CellTopology, users_per_cell: usize, target_rate: f64, seed: u64) -> UserPopulation {
    let half_width = topology.inter_site_distance / 2.0;
    let radius = topology.cell_radius();
    let mut users = Vec::with_capacity(users_per_cell * topology.num_cells());
    for (cell, center) in topology.cells.iter().enumerate() {
        for index_in_cell in 0..users_per_cell {
            let mut rng = substream(seed, Purpose::Placement, cell, index_in_cell, 0);
            let position = loop {
                let p = Position::new(
                    center.x + rng.random_range(-half_width..=half_width),
                    center.y + rng.random_range(-radius..=radius),
                );
                if topology.contains(cell, &p) {
                    break p;
                }
            };
            users.push(User { id: users.len(), cell, index_in_cell, position, target_rate });
        }
    }
    UserPopulation { users }
}

/// Macro-cell pathloss `intercept + slope * log10(d_km)` plus log-normal
/// shadowing and unit-mean exponential (Rayleigh power) fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub pathloss_intercept_db: f64,
    pub pathloss_slope_db: f64,
    pub shadow_std_db: f64,
    pub noise_power_w: f64,
}

impl ChannelModel {
    pub fn pathloss_db(&self, distance_m: f64) -> f64 {
        let d_km = distance_m.max(MIN_LINK_DISTANCE_M) / 1000.0;
        self.pathloss_intercept_db + self.pathloss_slope_db * d_km.log10()
    }

    /// Linear power gain of one link for a given shadowing (dB) and fading sample.
    pub fn link_gain(&self, distance_m: f64, shadow_db: f64, fading: f64) -> f64 {
        db_to_linear(shadow_db - self.pathloss_db(distance_m)) * fading
    }
}

/// Per (user, BS, PRB) linear gains frozen for one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    num_users: usize,
    num_cells: usize,
    num_prbs: usize,
    /// `[user][bs][prb]`
    gain: Vec<f64>,
    pub noise_power: f64,
}

impl ChannelTensor {
    /// Wraps explicit gains laid out `[user][bs][prb]`.
    pub fn from_gains(num_users: usize, num_cells: usize, num_prbs: usize, gain: Vec<f64>, noise_power: f64) -> Result<Self> {
        if gain.len() != num_users * num_cells * num_prbs {
            return Err(Error::Domain(format!(
                "expected {} gains, got {}",
                num_users * num_cells * num_prbs,
                gain.len()
            )));
        }
        if gain.iter().any(|g| !(g.is_finite() && *g > 0.0)) || !(noise_power > 0.0) {
            return Err(Error::Domain("gains and noise power must be positive and finite".into()));
        }
        Ok(Self { num_users, num_cells, num_prbs, gain, noise_power })
    }

    #[inline]
    pub fn gain(&self, user: usize, prb: usize, bs: usize) -> f64 {
        self.gain[(user * self.num_cells + bs) * self.num_prbs + prb]
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_prbs(&self) -> usize {
        self.num_prbs
    }
}

pub fn draw_channel(
    topology: &CellTopology,
    population: &UserPopulation,
    model: &ChannelModel,
    seed: u64,
) -> ChannelTensor {
    let (num_cells, num_prbs) = (topology.num_cells(), topology.num_prbs);
    let mut gain = Vec::with_capacity(population.len() * num_cells * num_prbs);
    for user in &population.users {
        for (bs, site) in topology.cells.iter().enumerate() {
            let distance = user.position.distance(site);
            let mut shadow_rng = substream(seed, Purpose::Shadowing, user.cell, user.index_in_cell, bs);
            let z: f64 = StandardNormal.sample(&mut shadow_rng);
            let shadow_db = z * model.shadow_std_db;
            let mut fading_rng = substream(seed, Purpose::Fading, user.cell, user.index_in_cell, bs);
            for _ in 0..num_prbs {
                let fading: f64 = Exp1.sample(&mut fading_rng);
                gain.push(model.link_gain(distance, shadow_db, fading));
            }
        }
    }
    ChannelTensor {
        num_users: population.len(),
        num_cells,
        num_prbs,
        gain,
        noise_power: model.noise_power_w,
    }
}

/// Transmit power per (cell, PRB) in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMap {
    num_prbs: usize,
    power: Vec<f64>,
}

impl PowerMap {
    pub fn new(num_cells: usize, num_prbs: usize, value: f64) -> Self {
        Self { num_prbs, power: vec![value; num_cells * num_prbs] }
    }

    /// `P / |π|` on every PRB of every cell.
    pub fn uniform(topology: &CellTopology) -> Self {
        let n = topology.num_prbs;
        let mut power = Vec::with_capacity(topology.num_cells() * n);
        for &budget in &topology.total_power_per_cell {
            power.extend(std::iter::repeat_n(budget / n as f64, n));
        }
        Self { num_prbs: n, power }
    }

    #[inline]
    pub fn get(&self, cell: usize, prb: usize) -> f64 {
        self.power[cell * self.num_prbs + prb]
    }

    #[inline]
    pub fn set(&mut self, cell: usize, prb: usize, watts: f64) {
        self.power[cell * self.num_prbs + prb] = watts;
    }

    pub fn cell(&self, cell: usize) -> &[f64] {
        &self.power[cell * self.num_prbs..(cell + 1) * self.num_prbs]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        &mut self.power[cell * self.num_prbs..(cell + 1) * self.num_prbs]
    }

    pub fn num_cells(&self) -> usize {
        self.power.len() / self.num_prbs
    }

    pub fn num_prbs(&self) -> usize {
        self.num_prbs
    }

    pub fn cell_total(&self, cell: usize) -> f64 {
        self.cell(cell).iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.power
    }

    /// Largest absolute per-PRB difference to `other`.
    pub fn max_change(&self, other: &PowerMap) -> f64 {
        self.power.iter().zip(&other.power).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Achievable rate and interference per (user, PRB) under one power map.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    num_prbs: usize,
    rate: Vec<f64>,
    interference: Vec<f64>,
}

impl RateTable {
    /// Builds a table from explicit per-user rates (interference set to zero).
    pub fn from_rates(rates: Vec<Vec<f64>>) -> Self {
        let num_prbs = rates.first().map_or(0, Vec::len);
        assert!(rates.iter().all(|r| r.len() == num_prbs), "ragged rate table");
        let rate: Vec<f64> = rates.into_iter().flatten().collect();
        let interference = vec![0.0; rate.len()];
        Self { num_prbs, rate, interference }
    }

    #[inline]
    pub fn rate(&self, user: usize, prb: usize) -> f64 {
        self.rate[user * self.num_prbs + prb]
    }

    #[inline]
    pub fn interference(&self, user: usize, prb: usize) -> f64 {
        self.interference[user * self.num_prbs + prb]
    }

    pub fn user_rates(&self, user: usize) -> &[f64] {
        &self.rate[user * self.num_prbs..(user + 1) * self.num_prbs]
    }

    pub fn num_users(&self) -> usize {
        if self.num_prbs == 0 {
            0
        } else {
            self.rate.len() / self.num_prbs
        }
    }

    pub fn num_prbs(&self) -> usize {
        self.num_prbs
    }
}

/// Shannon rate `B log2(1 + p h / (I + σ²))`.
#[inline]
pub fn shannon_rate(bandwidth: f64, power: f64, gain: f64, interference: f64, noise: f64) -> f64 {
    bandwidth * (power * gain / (interference + noise)).ln_1p() / std::f64::consts::LN_2
}

pub fn compute_rates(
    topology: &CellTopology,
    population: &UserPopulation,
    channel: &ChannelTensor,
    powers: &PowerMap,
) -> RateTable {
    let (num_cells, num_prbs) = (topology.num_cells(), topology.num_prbs);
    let mut rate = Vec::with_capacity(population.len() * num_prbs);
    let mut interference = Vec::with_capacity(population.len() * num_prbs);
    for user in &population.users {
        for prb in 0..num_prbs {
            let i: f64 = (0..num_cells)
                .filter(|&bs| bs != user.cell)
                .map(|bs| powers.get(bs, prb) * channel.gain(user.id, prb, bs))
                .sum();
            let own = powers.get(user.cell, prb);
            let r = if own > 0.0 {
                shannon_rate(topology.prb_bandwidth, own, channel.gain(user.id, prb, user.cell), i, channel.noise_power)
            } else {
                0.0
            };
            rate.push(r);
            interference.push(i);
        }
    }
    RateTable { num_prbs, rate, interference }
}

/// Everything fixed for one Monte-Carlo drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub topology: CellTopology,
    pub population: UserPopulation,
    pub channel: ChannelTensor,
}

impl Deployment {
    pub fn rates(&self, powers: &PowerMap) -> RateTable {
        compute_rates(&self.topology, &self.population, &self.channel, powers)
    }

    pub fn targets(&self) -> Vec<f64> {
        self.population.targets()
    }

    pub fn cell_users(&self, cell: usize) -> Vec<usize> {
        self.population.users_of(cell).map(|u| u.id).collect()
    }
}
