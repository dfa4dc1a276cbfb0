use std::collections::BTreeSet;

use proptest::prelude::*;

use ofdma_alloc::geometry::{shannon_rate, PowerMap};
use ofdma_alloc::graph::{build_graph, minimal_allocation_sets, AllocGraph, AllocationSetFamily};
use ofdma_alloc::harness::{simulate_drop, ScenarioConfig};
use ofdma_alloc::metrics::{eta, PowerMode};
use ofdma_alloc::power::{delta_power, dpra_network, DpraParams};
use ofdma_alloc::solvers::{approximation_ratio, exact_mwis, max_weight_independent_set, mwdg, Algorithm};

fn rates_strategy(max_prbs: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 9 => 0.0..1.0f64], (max_prbs + 1)..=10)
}

/// Every subset of size <= M that meets the target and has no proper subset
/// that does.
fn brute_force_minimal(rates: &[f64], target: f64, max_prbs: usize) -> BTreeSet<Vec<usize>> {
    let n = rates.len();
    let meets = |mask: u32| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| rates[i]).sum::<f64>() >= target * (1.0 - 1e-9);
    (1u32..1 << n)
        .filter(|&m| m.count_ones() as usize <= max_prbs && meets(m))
        .filter(|&m| (0..n).filter(|i| m >> i & 1 == 1).all(|i| !meets(m & !(1 << i))))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn random_graph() -> impl Strategy<Value = (AllocGraph, usize)> {
    (1usize..=3, 2usize..=5).prop_flat_map(|(m, users)| {
        (
            prop::collection::vec((rates_strategy(m), 0.3..0.9f64), users)
                .prop_map(move |rows| {
                    let num_prbs = rows.iter().map(|(r, _)| r.len()).min().unwrap();
                    let fams: Vec<_> = rows
                        .iter()
                        .enumerate()
                        .map(|(u, (r, t))| AllocationSetFamily::enumerate(u, &r[..num_prbs], t * m as f64, m))
                        .collect();
                    build_graph(&fams, num_prbs)
                }),
            Just(m),
        )
    })
}

/// Exhaustive MWIS over bitmasks.
fn brute_force_mwis(weights: &[u64], adjacency: &[u128]) -> u64 {
    let n = weights.len();
    (0u64..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || (adjacency[v] as u64) & s == 0))
        .map(|s| (0..n).filter(|v| s >> v & 1 == 1).map(|v| weights[v]).sum())
        .max()
        .unwrap()
}

fn random_weighted_graph() -> impl Strategy<Value = (Vec<u64>, Vec<u128>)> {
    (1usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(1u64..10, n), prop::collection::vec(any::<bool>(), n * n)).prop_map(move |(w, bits)| {
            let mut adj = vec![0u128; n];
            for a in 0..n {
                for b in a + 1..n {
                    if bits[a * n + b] {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
            }
            (w, adj)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn minimal_sets_match_exhaustive_search(rates in rates_strategy(3), target in 0.05..2.5f64, m in 1usize..=3) {
        let got: BTreeSet<Vec<usize>> = minimal_allocation_sets(&rates, target, m).into_iter().collect();
        prop_assert_eq!(got, brute_force_minimal(&rates, target, m));
    }

    #[test]
    fn adjacency_follows_construction_rules((g, _m) in random_graph()) {
        for a in 0..g.num_vertices() {
            let neighbors = g.neighbors(a);
            for b in 0..g.num_vertices() {
                let (va, vb) = (g.vertex(a), g.vertex(b));
                let expected = a != b && (va.owner == vb.owner || va.prbs.iter().any(|n| vb.prbs.contains(n)));
                prop_assert_eq!(g.is_adjacent(a, b), expected);
                prop_assert_eq!(g.is_adjacent(b, a), expected);
                prop_assert_eq!(neighbors.contains(&b), expected);
            }
            prop_assert_eq!(g.vertex(a).weight as usize, g.num_prbs() - g.vertex(a).prbs.len());
        }
        prop_assert_eq!(g.edges().len(), g.edge_count());
    }

    #[test]
    fn mwdg_output_is_a_valid_allocation((g, m) in random_graph()) {
        let (alloc, trace) = mwdg(&g);
        let picked = trace.selected();
        prop_assert!(g.is_independent(&picked));
        let owners: BTreeSet<usize> = picked.iter().map(|&v| g.vertex(v).owner).collect();
        prop_assert_eq!(owners.len(), picked.len());
        prop_assert_eq!(&owners, &alloc.satisfied);
        let all: BTreeSet<usize> = g.users().iter().copied().collect();
        let covered: BTreeSet<usize> = alloc.satisfied.union(&alloc.dropped).copied().collect();
        prop_assert_eq!(covered, all);
        for &v in &picked {
            prop_assert_eq!(&alloc.assignment[&g.vertex(v).owner], &g.vertex(v).prbs);
        }
        if g.num_vertices() > 0 && g.num_vertices() <= 40 && m >= 2 {
            let opt = exact_mwis(&g, 40).unwrap().weight as f64;
            let got = g.total_weight(&picked) as f64;
            prop_assert!(got * approximation_ratio(m, g.num_prbs()).unwrap() >= opt);
        }
    }

    #[test]
    fn exact_mwis_matches_exhaustive_search((weights, adjacency) in random_weighted_graph()) {
        let sol = max_weight_independent_set(&weights, &adjacency);
        prop_assert_eq!(sol.weight, brute_force_mwis(&weights, &adjacency));
        prop_assert_eq!(sol.vertices.iter().map(|&v| weights[v]).sum::<u64>(), sol.weight);
    }

    #[test]
    fn exact_mwis_ignores_vertex_order((weights, adjacency) in random_weighted_graph(), shift in 0usize..12) {
        let n = weights.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let mut w2 = vec![0; n];
        let mut a2 = vec![0u128; n];
        for v in 0..n {
            w2[perm[v]] = weights[v];
            for u in 0..n {
                if adjacency[v] >> u & 1 == 1 {
                    a2[perm[v]] |= 1 << perm[u];
                }
            }
        }
        prop_assert_eq!(max_weight_independent_set(&w2, &a2).weight, max_weight_independent_set(&weights, &adjacency).weight);
    }

    #[test]
    fn rate_grows_with_power_and_falls_with_interference(
        p in 1e-6..10.0f64, dp in 1e-6..10.0f64, h in 1e-12..1e-6f64, i in 0.0..1e-9f64, di in 1e-12..1e-9f64,
    ) {
        let b = 180e3;
        let noise = 1e-13;
        let r = shannon_rate(b, p, h, i, noise);
        prop_assert!(r >= 0.0);
        prop_assert!(shannon_rate(b, p + dp, h, i, noise) > r);
        prop_assert!(shannon_rate(b, p, h, i + di, noise) < r);
    }

    #[test]
    fn delta_power_grows_with_excess(r in 1.0..1e6f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let dp = |x: f64| delta_power(r, x * r * 0.999, 1e-10, 1e-13, 1e-9, 2e5).unwrap();
        prop_assert!(dp(lo) >= 0.0);
        prop_assert!(dp(hi) >= dp(lo));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn drop_level_invariants(seed in any::<u64>(), users in 2usize..14, m in 1usize..=3) {
        let config = ScenarioConfig {
            users_per_cell: vec![users],
            max_prbs: m,
            master_seed: seed,
            algorithm: Algorithm::ALL.to_vec(),
            power_mode: vec![PowerMode::Uniform, PowerMode::Dpra],
            ..ScenarioConfig::default()
        };
        let record = simulate_drop(&config, users, 0).unwrap();
        let uniform = PowerMap::uniform(&record.deployment.topology);
        for e in &record.evaluations {
            if let Some(x) = eta(&e.result) {
                prop_assert!((1.0..=m as f64).contains(&x));
            }
            prop_assert!(e.result.dropped_total() <= 7 * users);
            if e.power_mode == PowerMode::Dpra {
                prop_assert!(e.powers.values().iter().zip(uniform.values()).all(|(p, u)| p <= u));
                prop_assert!(e.powers.total() <= uniform.total());
                let totals: Vec<f64> = e.dpra.as_ref().unwrap().trace.iter().map(|t| t.total_power_w).collect();
                prop_assert!(totals.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }

    #[test]
    fn dpra_output_is_a_fixed_point_when_rerun(seed in any::<u64>(), users in 2usize..10) {
        let config = ScenarioConfig {
            users_per_cell: vec![users],
            master_seed: seed,
            power_mode: vec![PowerMode::Dpra],
            dpra_max_rounds: 400,
            ..ScenarioConfig::default()
        };
        let record = simulate_drop(&config, users, 0).unwrap();
        let e = &record.evaluations[0];
        let d = e.dpra.as_ref().unwrap();
        prop_assume!(d.converged);
        let params = DpraParams::relative(&record.deployment, 400, 1e-6);
        let again = dpra_network(&record.deployment, &e.allocations, &e.powers, &params).unwrap();
        prop_assert!(again.powers.max_change(&e.powers) < 10.0 * params.epsilon_w);
        prop_assert_eq!(&again.allocations, &e.allocations);
    }

    #[test]
    fn config_round_trips_through_toml(
        seed in any::<u64>(), drops in 1usize..500, m in 1usize..4,
        users in prop::collection::vec(1usize..40, 1..4), dpra in any::<bool>(),
    ) {
        let config = ScenarioConfig {
            master_seed: seed,
            num_drops: drops,
            max_prbs: m,
            users_per_cell: users,
            power_mode: if dpra { vec![PowerMode::Uniform, PowerMode::Dpra] } else { vec![PowerMode::Uniform] },
            ..ScenarioConfig::default()
        };
        let parsed = ScenarioConfig::from_toml_str(&config.to_toml_string()).unwrap();
        prop_assert_eq!(parsed, config);
    }
}
