//! Single-cell PRB allocation: the minimal weighted-degree greedy (MWDG)
//! solver, an exact maximum-weight independent set oracle, and two greedy
//! baselines (random order and ascending mean rate).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Deployment, RateTable};
use crate::rng::{substream, Purpose};
use crate::graph::{build_graph, meets_target, AllocGraph, AllocationSetFamily, PrbSet, WeightedDegree};

/// Default vertex cap of [`exact_mwis`].
pub const EXACT_MWIS_DEFAULT_CAP: usize = 40;

/// Per-cell PRB assignment (the rows of the cell's allocation matrix).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AllocationMatrix {
    pub num_prbs: usize,
    pub assignment: BTreeMap<usize, PrbSet>,
    pub satisfied: BTreeSet<usize>,
    pub dropped: BTreeSet<usize>,
}

impl AllocationMatrix {
    pub fn new(num_prbs: usize) -> Self {
        Self { num_prbs, ..Default::default() }
    }

    fn serve(&mut self, user: usize, prbs: PrbSet) {
        self.assignment.insert(user, prbs);
        self.satisfied.insert(user);
    }

    /// Number of occupied PRBs.
    pub fn load(&self) -> usize {
        self.assignment.values().map(Vec::len).sum()
    }

    pub fn users(&self) -> impl Iterator<Item = usize> + '_ {
        self.satisfied.union(&self.dropped).copied()
    }

    pub fn prb_owner(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.num_prbs];
        for (&u, prbs) in &self.assignment {
            for &n in prbs {
                owner[n] = Some(u);
            }
        }
        owner
    }

    pub fn unallocated_prbs(&self) -> Vec<usize> {
        self.prb_owner().iter().enumerate().filter(|(_, o)| o.is_none()).map(|(n, _)| n).collect()
    }

    /// Lists every violated allocation constraint: PRB exclusivity, the
    /// per-user cap, target attainment under `rates`, and the
    /// served/dropped partition.
    pub fn violations(&self, rates: &RateTable, targets: &[f64], max_prbs: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut owner: Vec<Option<usize>> = vec![None; self.num_prbs];
        for (&u, prbs) in &self.assignment {
            if !self.satisfied.contains(&u) {
                out.push(format!("user {u} holds PRBs but is not marked satisfied"));
            }
            if prbs.is_empty() || prbs.len() > max_prbs {
                out.push(format!("user {u} holds {} PRBs (cap {max_prbs})", prbs.len()));
            }
            for &n in prbs {
                match owner.get(n) {
                    None => out.push(format!("user {u} holds out-of-range PRB {n}")),
                    Some(Some(other)) => out.push(format!("PRB {n} assigned to users {other} and {u}")),
                    Some(None) => owner[n] = Some(u),
                }
            }
            let sum: f64 = prbs.iter().map(|&n| rates.rate(u, n)).sum();
            if !meets_target(sum, targets[u]) {
                out.push(format!("user {u} gets {sum} b/s, target {}", targets[u]));
            }
        }
        for &u in &self.satisfied {
            if !self.assignment.contains_key(&u) {
                out.push(format!("satisfied user {u} has no assignment"));
            }
            if self.dropped.contains(&u) {
                out.push(format!("user {u} is both satisfied and dropped"));
            }
        }
        for &u in &self.dropped {
            if self.assignment.contains_key(&u) {
                out.push(format!("dropped user {u} holds PRBs"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwdgStep {
    pub iteration: usize,
    pub selected: usize,
    /// The selected vertex and its residual neighbors.
    pub removed: Vec<usize>,
    /// Vertices left after the removal.
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MwdgTrace {
    pub steps: Vec<MwdgStep>,
}

impl MwdgTrace {
    pub fn selected(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.selected).collect()
    }
}

/// Residual graph of an MWDG run with weighted degrees maintained
/// incrementally.
///
/// The cross-clique part of a numerator is the weight of other-clique
/// vertices sharing a PRB with `v`. By inclusion-exclusion over the non-empty
/// subsets `T` of `v`'s PRB set it equals
/// `Σ_T (-1)^{|T|+1} (A(T) - A_c(T))`, where `A(T)` is the live weight of all
/// vertices containing `T` and `A_c(T)` the same restricted to `v`'s clique.
/// Removing a vertex touches only its own subsets.
struct Residual<'g> {
    graph: &'g AllocGraph,
    alive: Vec<bool>,
    live: Vec<usize>,
    clique_weight: Vec<i64>,
    subset_weight: Vec<i64>,
    clique_subset_weight: Vec<i64>,
    /// Per vertex `terms[offsets[v]..offsets[v + 1]]`: (subset, clique subset, odd size).
    offsets: Vec<usize>,
    terms: Vec<(usize, usize, bool)>,
}

impl<'g> Residual<'g> {
    fn new(graph: &'g AllocGraph) -> Self {
        let n = graph.num_vertices();
        let mut subset_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut clique_subset_index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut subset_weight = Vec::new();
        let mut clique_subset_weight = Vec::new();
        let mut clique_weight = vec![0i64; graph.cliques().len()];
        let mut offsets = Vec::with_capacity(n + 1);
        let mut terms = Vec::new();
        offsets.push(0);
        for v in graph.vertices() {
            let w = v.weight as i64;
            clique_weight[v.clique] += w;
            let k = v.prbs.len();
            for mask in 1u64..(1 << k) {
                let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| v.prbs[i]).collect();
                let next = subset_index.len();
                let g = *subset_index.entry(subset.clone()).or_insert(next);
                if g == subset_weight.len() {
                    subset_weight.push(0);
                }
                subset_weight[g] += w;
                let next = clique_subset_index.len();
                let l = *clique_subset_index.entry((v.clique, subset)).or_insert(next);
                if l == clique_subset_weight.len() {
                    clique_subset_weight.push(0);
                }
                clique_subset_weight[l] += w;
                terms.push((g, l, mask.count_ones() % 2 == 1));
            }
            offsets.push(terms.len());
        }
        Self {
            graph,
            alive: vec![true; n],
            live: (0..n).collect(),
            clique_weight,
            subset_weight,
            clique_subset_weight,
            offsets,
            terms,
        }
    }

    fn weighted_degree(&self, v: usize) -> WeightedDegree {
        let vertex = self.graph.vertex(v);
        let mut numerator = self.clique_weight[vertex.clique] - vertex.weight as i64;
        for &(g, l, odd) in &self.terms[self.offsets[v]..self.offsets[v + 1]] {
            let cross = self.subset_weight[g] - self.clique_subset_weight[l];
            numerator += if odd { cross } else { -cross };
        }
        debug_assert!(numerator >= 0);
        WeightedDegree { numerator: numerator as u64, denominator: vertex.weight }
    }

    fn remove(&mut self, v: usize) {
        let vertex = self.graph.vertex(v);
        let w = vertex.weight as i64;
        self.alive[v] = false;
        self.clique_weight[vertex.clique] -= w;
        for &(g, l, _) in &self.terms[self.offsets[v]..self.offsets[v + 1]] {
            self.subset_weight[g] -= w;
            self.clique_subset_weight[l] -= w;
        }
    }

    /// Live vertex minimizing the weighted degree, lowest id on ties.
    fn argmin(&self) -> Option<usize> {
        let mut best: Option<(WeightedDegree, usize)> = None;
        for &v in &self.live {
            let d = self.weighted_degree(v);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        best.map(|(_, v)| v)
    }

    /// `v` plus its live neighbors, ascending.
    fn closed_neighborhood(&self, v: usize) -> Vec<usize> {
        let vertex = self.graph.vertex(v);
        let mut out: Vec<usize> =
            self.graph.cliques()[vertex.clique].vertices.clone().filter(|&w| self.alive[w]).collect();
        for &n in &vertex.prbs {
            out.extend(self.graph.incidence(n).iter().copied().filter(|&w| self.alive[w]));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Minimal weighted-degree greedy allocation.
///
/// Repeatedly selects the live vertex of minimum weighted degree (lowest id
/// on ties), assigns its PRB set to its owner and deletes its closed
/// neighborhood. Users whose whole clique disappears unselected, and users
/// excluded from the graph, are dropped.
pub fn mwdg(graph: &AllocGraph) -> (AllocationMatrix, MwdgTrace) {
    let mut residual = Residual::new(graph);
    let mut allocation = AllocationMatrix::new(graph.num_prbs());
    let mut trace = MwdgTrace::default();
    while let Some(m) = residual.argmin() {
        let removed = residual.closed_neighborhood(m);
        for &v in &removed {
            residual.remove(v);
        }
        residual.live.retain(|&v| residual.alive[v]);
        let vertex = graph.vertex(m);
        allocation.serve(vertex.owner, vertex.prbs.clone());
        trace.steps.push(MwdgStep {
            iteration: trace.steps.len() + 1,
            selected: m,
            removed,
            remaining: residual.live.len(),
        });
    }
    for &u in graph.users() {
        if !allocation.satisfied.contains(&u) {
            allocation.dropped.insert(u);
        }
    }
    (allocation, trace)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwisSolution {
    pub vertices: Vec<usize>,
    pub weight: u64,
}

/// Exact maximum-weight independent set of an allocation graph, refusing
/// graphs above `cap` vertices (at most 128).
pub fn exact_mwis(graph: &AllocGraph, cap: usize) -> Result<MwisSolution> {
    let n = graph.num_vertices();
    if n > cap.min(128) {
        return Err(Error::OracleCap { vertices: n, cap: cap.min(128) });
    }
    let weights: Vec<u64> = graph.vertices().iter().map(|v| v.weight).collect();
    let adjacency: Vec<u128> = (0..n)
        .map(|v| graph.neighbors(v).into_iter().fold(0u128, |acc, w| acc | 1u128 << w))
        .collect();
    Ok(max_weight_independent_set(&weights, &adjacency))
}

/// Branch and bound over at most 128 vertices given as adjacency bitmasks.
///
/// Branches on the vertex of highest residual degree; the bound is the sum of
/// the heaviest weights of a greedy clique partition of the candidates, which
/// caps what any independent set can still collect.
pub fn max_weight_independent_set(weights: &[u64], adjacency: &[u128]) -> MwisSolution {
    assert!(weights.len() <= 128 && weights.len() == adjacency.len());
    struct Search<'a> {
        weights: &'a [u64],
        adjacency: &'a [u128],
        best_weight: u64,
        best_set: u128,
    }

    impl Search<'_> {
        fn bound(&self, mut candidates: u128) -> u64 {
            let mut total = 0;
            while candidates != 0 {
                let v = candidates.trailing_zeros() as usize;
                let mut clique_mask = 1u128 << v;
                let mut common = self.adjacency[v] & candidates;
                let mut heaviest = self.weights[v];
                while common != 0 {
                    let w = common.trailing_zeros() as usize;
                    clique_mask |= 1u128 << w;
                    heaviest = heaviest.max(self.weights[w]);
                    common &= self.adjacency[w];
                }
                total += heaviest;
                candidates &= !clique_mask;
            }
            total
        }

        fn run(&mut self, candidates: u128, chosen: u128, weight: u64) {
            if candidates == 0 {
                if weight > self.best_weight {
                    self.best_weight = weight;
                    self.best_set = chosen;
                }
                return;
            }
            if weight + self.bound(candidates) <= self.best_weight {
                return;
            }
            let mut pivot = usize::MAX;
            let mut pivot_degree = 0;
            let mut rest = candidates;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let d = (self.adjacency[v] & candidates).count_ones();
                if pivot == usize::MAX || d > pivot_degree {
                    pivot = v;
                    pivot_degree = d;
                }
            }
            if pivot_degree == 0 {
                let gain: u64 = bits(candidates).map(|v| self.weights[v]).sum();
                self.run(0, chosen | candidates, weight + gain);
                return;
            }
            let bit = 1u128 << pivot;
            self.run(candidates & !bit & !self.adjacency[pivot], chosen | bit, weight + self.weights[pivot]);
            self.run(candidates & !bit, chosen, weight);
        }
    }

    fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
        std::iter::from_fn(move || {
            (mask != 0).then(|| {
                let v = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                v
            })
        })
    }

    let n = weights.len();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut search = Search { weights, adjacency, best_weight: 0, best_set: 0 };
    search.run(all, 0, 0);
    MwisSolution { vertices: bits(search.best_set).collect(), weight: search.best_weight }
}

/// Worst-case ratio between the optimal and the MWDG independent-set weight,
/// `M · max((|π| − 2) / (|π| − M), 1)`.
pub fn approximation_ratio(max_prbs: usize, num_prbs: usize) -> Result<f64> {
    if num_prbs < 2 || max_prbs < 1 || max_prbs >= num_prbs {
        return Err(Error::Domain(format!("ratio needs 1 <= M < |PRBs| and |PRBs| >= 2, got M={max_prbs}, |PRBs|={num_prbs}")));
    }
    let m = max_prbs as f64;
    let n = num_prbs as f64;
    Ok(m * ((n - 2.0) / (n - m)).max(1.0))
}

/// Serves users in the given order, each taking its best free PRBs until the
/// target is met; a user still short after `max_prbs` PRBs (or once the free
/// PRBs run out) releases them and is dropped.
pub fn greedy_allocate(rates: &RateTable, order: &[usize], targets: &[f64], max_prbs: usize) -> AllocationMatrix {
    let num_prbs = rates.num_prbs();
    let mut allocation = AllocationMatrix::new(num_prbs);
    let mut free = vec![true; num_prbs];
    for &u in order {
        let r = rates.user_rates(u);
        let mut candidates: Vec<usize> = (0..num_prbs).filter(|&n| free[n] && r[n] > 0.0).collect();
        candidates.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
        let mut taken = Vec::new();
        let mut sum = 0.0;
        for n in candidates.into_iter().take(max_prbs) {
            taken.push(n);
            sum += r[n];
            if meets_target(sum, targets[u]) {
                break;
            }
        }
        if !taken.is_empty() && meets_target(sum, targets[u]) {
            for &n in &taken {
                free[n] = false;
            }
            taken.sort_unstable();
            allocation.serve(u, taken);
        } else {
            allocation.dropped.insert(u);
        }
    }
    allocation
}

/// Random greedy: users served in a uniformly shuffled order.
pub fn rg_allocate<R: Rng + ?Sized>(
    rates: &RateTable,
    cell_users: &[usize],
    targets: &[f64],
    max_prbs: usize,
    rng: &mut R,
) -> AllocationMatrix {
    let mut order = cell_users.to_vec();
    order.sort_unstable();
    order.shuffle(rng);
    greedy_allocate(rates, &order, targets, max_prbs)
}

/// Mean-enhanced greedy: users served by ascending mean rate over all PRBs,
/// ties by user id.
pub fn meg_allocate(rates: &RateTable, cell_users: &[usize], targets: &[f64], max_prbs: usize) -> AllocationMatrix {
    let mean = |u: usize| {
        let r = rates.user_rates(u);
        r.iter().sum::<f64>() / r.len() as f64
    };
    let mut order = cell_users.to_vec();
    order.sort_by(|&a, &b| mean(a).total_cmp(&mean(b)).then(a.cmp(&b)));
    greedy_allocate(rates, &order, targets, max_prbs)
}

/// Enumerates families, builds the conflict graph and runs MWDG for one cell.
pub fn mwdg_allocate(rates: &RateTable, cell_users: &[usize], targets: &[f64], max_prbs: usize) -> AllocationMatrix {
    let families: Vec<AllocationSetFamily> = cell_users
        .iter()
        .map(|&u| AllocationSetFamily::enumerate(u, rates.user_rates(u), targets[u], max_prbs))
        .collect();
    mwdg(&build_graph(&families, rates.num_prbs())).0
}

/// Allocates every cell of a deployment independently under `rates`.
/// Random-order substreams are keyed by `(cell, iteration)`.
pub fn allocate_network(
    deployment: &Deployment,
    rates: &RateTable,
    algorithm: Algorithm,
    max_prbs: usize,
    ordering_seed: u64,
    iteration: usize,
) -> Vec<AllocationMatrix> {
    let targets = deployment.targets();
    (0..deployment.topology.num_cells())
        .map(|cell| {
            let mut rng = substream(ordering_seed, Purpose::Ordering, cell, iteration, 0);
            algorithm.allocate(rates, &deployment.cell_users(cell), &targets, max_prbs, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mwdg,
    Rg,
    Meg,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Mwdg, Algorithm::Rg, Algorithm::Meg];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Mwdg => "mwdg",
            Algorithm::Rg => "rg",
            Algorithm::Meg => "meg",
        }
    }

    /// Allocates one cell; `rng` is only consumed by [`Algorithm::Rg`].
    pub fn allocate<R: Rng + ?Sized>(
        self,
        rates: &RateTable,
        cell_users: &[usize],
        targets: &[f64],
        max_prbs: usize,
        rng: &mut R,
    ) -> AllocationMatrix {
        match self {
            Algorithm::Mwdg => mwdg_allocate(rates, cell_users, targets, max_prbs),
            Algorithm::Rg => rg_allocate(rates, cell_users, targets, max_prbs, rng),
            Algorithm::Meg => meg_allocate(rates, cell_users, targets, max_prbs),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mwdg" => Ok(Algorithm::Mwdg),
            "rg" => Ok(Algorithm::Rg),
            "meg" => Ok(Algorithm::Meg),
            other => Err(Error::Config(format!("unknown algorithm `{other}` (expected mwdg, rg or meg)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_graph() -> AllocGraph {
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

    #[test]
    fn mwdg_on_toy_graph() {
        let g = toy_graph();
        let (alloc, trace) = mwdg(&g);
        assert_eq!(trace.selected(), vec![3, 1, 8]);
        assert_eq!(trace.steps[0].removed, vec![0, 3, 4, 5, 6]);
        assert_eq!(alloc.assignment[&1], vec![0]);
        assert_eq!(alloc.assignment[&0], vec![1]);
        assert_eq!(alloc.assignment[&2], vec![3]);
        assert!(alloc.dropped.is_empty());
    }

    #[test]
    fn incremental_degrees_match_residual_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let num_prbs = rng.random_range(3..9);
            let users = rng.random_range(1..6);
            let m = rng.random_range(1..=3.min(num_prbs - 1));
            let families: Vec<_> = (0..users)
                .map(|u| {
                    let rates: Vec<f64> = (0..num_prbs).map(|_| rng.random_range(0.0..1.0)).collect();
                    AllocationSetFamily::enumerate(u, &rates, rng.random_range(0.2..1.5), m)
                })
                .collect();
            let g = build_graph(&families, num_prbs);
            let mut residual = Residual::new(&g);
            while let Some(m) = residual.argmin() {
                for &v in &residual.live {
                    let explicit: u64 = g
                        .neighbors(v)
                        .iter()
                        .filter(|&&w| residual.alive[w])
                        .map(|&w| g.vertex(w).weight)
                        .sum();
                    assert_eq!(residual.weighted_degree(v).numerator, explicit);
                }
                for v in residual.closed_neighborhood(m) {
                    residual.remove(v);
                }
                residual.live.retain(|&v| residual.alive[v]);
            }
        }
    }

    #[test]
    fn single_vertex() {
        let g = build_graph(&[AllocationSetFamily::from_sets(7, vec![vec![2]])], 4);
        let (alloc, trace) = mwdg(&g);
        assert_eq!(alloc.assignment[&7], vec![2]);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].remaining, 0);
    }

    #[test]
    fn excluded_user_is_dropped() {
        let g = build_graph(&[AllocationSetFamily::from_sets(0, vec![vec![0]]), AllocationSetFamily::from_sets(1, vec![])], 3);
        let (alloc, _) = mwdg(&g);
        assert_eq!(alloc.dropped, BTreeSet::from([1]));
    }

    #[test]
    fn exact_mwis_basics() {
        assert_eq!(max_weight_independent_set(&[], &[]), MwisSolution { vertices: vec![], weight: 0 });
        // Triangle: only one vertex may be taken.
        let adj = [0b110, 0b101, 0b011];
        assert_eq!(max_weight_independent_set(&[2, 5, 3], &adj).vertices, vec![1]);
        let toy = exact_mwis(&toy_graph(), EXACT_MWIS_DEFAULT_CAP).unwrap();
        assert_eq!(toy.weight, 9);
    }

    #[test]
    fn exact_mwis_refuses_large_graphs() {
        let families: Vec<_> = (0..5).map(|u| AllocationSetFamily::from_sets(u, (0..10).map(|n| vec![n]).collect())).collect();
        let g = build_graph(&families, 12);
        assert!(matches!(exact_mwis(&g, 40), Err(Error::OracleCap { vertices: 50, cap: 40 })));
    }

    #[test]
    fn ratio_values() {
        assert_eq!(approximation_ratio(1, 2).unwrap(), 1.0);
        assert_eq!(approximation_ratio(1, 24).unwrap(), 1.0);
        assert_eq!(approximation_ratio(2, 24).unwrap(), 2.0);
        assert!((approximation_ratio(3, 24).unwrap() - 22.0 / 7.0).abs() < 1e-15);
        assert!(approximation_ratio(0, 24).is_err());
        assert!(approximation_ratio(24, 24).is_err());
        assert!(approximation_ratio(1, 1).is_err());
    }

    #[test]
    fn greedy_baselines() {
        let rates = RateTable::from_rates(vec![vec![5e6, 1e6]]);
        let a = greedy_allocate(&rates, &[0], &[4e6], 2);
        assert_eq!(a.assignment[&0], vec![0]);

        let rates = RateTable::from_rates(vec![vec![1.0], vec![1.0]]);
        let a = greedy_allocate(&rates, &[0, 1], &[1.0, 1.0], 1);
        assert_eq!(a.satisfied, BTreeSet::from([0]));
        assert_eq!(a.dropped, BTreeSet::from([1]));

        // Mean rate 1 for user 1, 2 for user 0: user 1 picks first.
        let rates = RateTable::from_rates(vec![vec![2.0, 2.0], vec![2.0, 0.0]]);
        let a = meg_allocate(&rates, &[0, 1], &[1.0, 1.0], 1);
        assert_eq!(a.assignment[&1], vec![0]);
        assert_eq!(a.assignment[&0], vec![1]);

        let same = RateTable::from_rates(vec![vec![1.0]; 3]);
        let a = meg_allocate(&same, &[2, 0, 1], &[1.0; 3], 1);
        assert_eq!(a.satisfied, BTreeSet::from([0]));
    }

    #[test]
    fn greedy_drops_user_short_at_cap() {
        let rates = RateTable::from_rates(vec![vec![1.0, 1.0, 1.0]]);
        let a = greedy_allocate(&rates, &[0], &[2.5], 2);
        assert!(a.assignment.is_empty());
        assert_eq!(a.dropped, BTreeSet::from([0]));
        assert!(a.violations(&rates, &[2.5], 2).is_empty());
    }

    #[test]
    fn violations_are_reported() {
        let rates = RateTable::from_rates(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let mut a = AllocationMatrix::new(2);
        a.serve(0, vec![0, 1]);
        a.serve(1, vec![1]);
        let v = a.violations(&rates, &[1.0, 5.0], 1);
        assert!(v.iter().any(|s| s.contains("cap")));
        assert!(v.iter().any(|s| s.contains("PRB 1 assigned")));
        assert!(v.iter().any(|s| s.contains("target")));
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("MWDG".parse::<Algorithm>().unwrap(), Algorithm::Mwdg);
        assert!("ffr".parse::<Algorithm>().is_err());
    }
}
