//! Minimal PRB allocation sets and the vertex-weighted conflict graph built
//! from them.
//!
//! Every vertex is one candidate PRB set of one user, weighted by the number
//! of PRBs it leaves free. Candidates of the same user form a clique; sets of
//! different users are adjacent when they share a PRB. An independent set is
//! therefore a feasible single-cell allocation.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io;

use itertools::Itertools;

/// Sorted, duplicate-free PRB indices.
pub type PrbSet = Vec<usize>;

/// Relative slack accepted when checking a rate sum against a target. Power
/// reassignment drives rates to exactly the target, so an exact comparison
/// would flip on the last ulp.
pub const RATE_TOLERANCE: f64 = 1e-9;

#[inline]
pub fn meets_target(rate_sum: f64, target: f64) -> bool {
    rate_sum >= target * (1.0 - RATE_TOLERANCE)
}

/// Enumerates every inclusion-minimal PRB set of size at most `max_prbs`
/// whose summed rate reaches `target`, in lexicographic order.
///
/// PRBs with zero rate never take part. Since rates are non-negative, a set
/// that meets the target is minimal exactly when dropping its weakest PRB
/// misses the target, so candidates are checked in O(|set|).
pub fn minimal_allocation_sets(user_rates: &[f64], target: f64, max_prbs: usize) -> Vec<PrbSet> {
    let pool: Vec<usize> = (0..user_rates.len()).filter(|&n| user_rates[n] > 0.0).collect();
    let mut best_first: Vec<f64> = pool.iter().map(|&n| user_rates[n]).collect();
    best_first.sort_by(|a, b| b.total_cmp(a));

    let mut out = Vec::new();
    for size in 1..=max_prbs.min(pool.len()) {
        // Skip sizes whose best possible sum is short of the target.
        if !meets_target(best_first[..size].iter().sum(), target) {
            continue;
        }
        for combo in pool.iter().copied().combinations(size) {
            let (sum, weakest) = combo
                .iter()
                .fold((0.0, f64::INFINITY), |(s, m), &n| (s + user_rates[n], m.min(user_rates[n])));
            if meets_target(sum, target) && !meets_target(sum - weakest, target) {
                out.push(combo);
            }
        }
    }
    out.sort();
    out
}

/// Candidate sets of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationSetFamily {
    pub user: usize,
    pub sets: Vec<PrbSet>,
    pub target_rate: f64,
    pub max_prbs: usize,
}

impl AllocationSetFamily {
    pub fn enumerate(user: usize, user_rates: &[f64], target_rate: f64, max_prbs: usize) -> Self {
        Self { user, sets: minimal_allocation_sets(user_rates, target_rate, max_prbs), target_rate, max_prbs }
    }

    /// Family with explicit sets, e.g. hand-built examples.
    pub fn from_sets(user: usize, sets: Vec<PrbSet>) -> Self {
        let max_prbs = sets.iter().map(Vec::len).max().unwrap_or(0);
        Self { user, sets, target_rate: 0.0, max_prbs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub owner: usize,
    /// Index into [`AllocGraph::cliques`].
    pub clique: usize,
    pub prbs: PrbSet,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clique {
    pub user: usize,
    /// Vertices of a clique are contiguous.
    pub vertices: std::ops::Range<usize>,
}

/// Conflict graph of one cell.
///
/// Adjacency is implied by the construction rules and answered through a
/// per-PRB incidence index instead of an explicit edge list; the graphs grow
/// to tens of thousands of dense edges at `M = 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocGraph {
    num_prbs: usize,
    vertices: Vec<Vertex>,
    cliques: Vec<Clique>,
    /// Every user handed to [`build_graph`], including excluded ones.
    users: Vec<usize>,
    excluded_users: Vec<usize>,
    /// Vertex ids containing each PRB, ascending.
    incidence: Vec<Vec<usize>>,
}

/// Builds the conflict graph. Users are taken in ascending id order and their
/// sets lexicographically, which fixes vertex ids. Users with an empty family
/// get no clique and are reported through [`AllocGraph::excluded_users`].
pub fn build_graph(families: &[AllocationSetFamily], num_prbs: usize) -> AllocGraph {
    let mut order: Vec<&AllocationSetFamily> = families.iter().collect();
    order.sort_by_key(|f| f.user);

    let mut vertices = Vec::new();
    let mut cliques = Vec::new();
    let mut excluded_users = Vec::new();
    let mut incidence = vec![Vec::new(); num_prbs];
    for family in &order {
        let mut sets: Vec<PrbSet> = family
            .sets
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .filter(|s| !s.is_empty())
            .collect();
        sets.sort();
        sets.dedup();
        if sets.is_empty() {
            excluded_users.push(family.user);
            continue;
        }
        let start = vertices.len();
        for prbs in sets {
            let id = vertices.len();
            for &n in &prbs {
                assert!(n < num_prbs, "PRB {n} out of range for {num_prbs} PRBs");
                incidence[n].push(id);
            }
            let weight = (num_prbs - prbs.len()) as u64;
            vertices.push(Vertex { id, owner: family.user, clique: cliques.len(), prbs, weight });
        }
        cliques.push(Clique { user: family.user, vertices: start..vertices.len() });
    }
    AllocGraph {
        num_prbs,
        vertices,
        cliques,
        users: order.iter().map(|f| f.user).collect(),
        excluded_users,
        incidence,
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => return true,
        }
    }
    false
}

/// Exact `numerator / denominator` ratio; all weights are integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedDegree {
    pub numerator: u64,
    pub denominator: u64,
}

impl WeightedDegree {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl Ord for WeightedDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator as u128 * other.denominator as u128).cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

impl PartialOrd for WeightedDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AllocGraph {
    pub fn num_prbs(&self) -> usize {
        self.num_prbs
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    pub fn users(&self) -> &[usize] {
        &self.users
    }

    pub fn excluded_users(&self) -> &[usize] {
        &self.excluded_users
    }

    /// Vertex ids whose PRB set contains `prb`.
    pub fn incidence(&self, prb: usize) -> &[usize] {
        &self.incidence[prb]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let (va, vb) = (&self.vertices[a], &self.vertices[b]);
        va.clique == vb.clique || intersects(&va.prbs, &vb.prbs)
    }

    /// Sorted neighbor ids of `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let vertex = &self.vertices[v];
        let mut out: Vec<usize> = self.cliques[vertex.clique].vertices.clone().filter(|&w| w != v).collect();
        for &n in &vertex.prbs {
            out.extend(self.incidence[n].iter().copied().filter(|&w| self.vertices[w].clique != vertex.clique));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.neighbors(v).len()).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_vertices())
            .flat_map(|a| self.neighbors(a).into_iter().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    /// Neighbor weight sum over own weight, on the full graph.
    pub fn weighted_degree(&self, v: usize) -> WeightedDegree {
        let numerator = self.neighbors(v).iter().map(|&w| self.vertices[w].weight).sum();
        WeightedDegree { numerator, denominator: self.vertices[v].weight }
    }

    pub fn total_weight(&self, selection: &[usize]) -> u64 {
        selection.iter().map(|&v| self.vertices[v].weight).sum()
    }

    pub fn is_independent(&self, selection: &[usize]) -> bool {
        selection.iter().enumerate().all(|(i, &a)| selection[i + 1..].iter().all(|&b| a != b && !self.is_adjacent(a, b)))
    }

    /// Plain-text adjacency dump: one line per vertex,
    /// `id<TAB>owner<TAB>prbs<TAB>weight<TAB>neighbors`, sets comma-separated.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = String::from("# vertex\towner\tprbs\tweight\tneighbors\n");
        for v in &self.vertices {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                v.id,
                v.owner,
                v.prbs.iter().join(","),
                v.weight,
                self.neighbors(v.id).iter().join(",")
            );
        }
        out
    }

    pub fn write_adjacency<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_adjacency_text().as_bytes())
    }
}
