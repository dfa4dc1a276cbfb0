use ofdma_alloc::geometry::{
    build_hex_grid, ChannelTensor, Deployment, Position, PowerMap, RadioParams, User, UserPopulation,
};
use ofdma_alloc::power::{dpra_network, DpraParams};
use ofdma_alloc::solvers::{mwdg, AllocationMatrix, MwdgStep};
use ofdma_alloc::verify::toy_graph;

#[test]
fn toy_adjacency_matches_golden_file() {
    assert_eq!(toy_graph().to_adjacency_text(), include_str!("golden/toy_graph.txt"));
}

#[test]
fn toy_mwdg_trace() {
    let (_, trace) = mwdg(&toy_graph());
    let step = |iteration, selected, removed: &[usize], remaining| MwdgStep { iteration, selected, removed: removed.to_vec(), remaining };
    assert_eq!(trace.steps, vec![step(1, 3, &[0, 3, 4, 5, 6], 4), step(2, 1, &[1, 2, 7], 1), step(3, 8, &[8], 0)]);
}

/// One cell, one user holding two PRBs, unit gains and noise, 1 Hz PRBs and a
/// 4.5 bit/s target under 7.5 W per PRB.
#[test]
fn single_cell_dpra_trace() {
    let radio = RadioParams { total_power_w: 15.0, num_prbs: 2, system_bandwidth_hz: 2.0 };
    let topology = build_hex_grid(500.0, 1, &radio).unwrap();
    let user = User { id: 0, cell: 0, index_in_cell: 0, position: Position::new(10.0, 0.0), target_rate: 4.5 };
    let population = UserPopulation { users: vec![user] };
    let channel = ChannelTensor::from_gains(1, 1, 2, vec![1.0, 1.0], 1.0).unwrap();
    let deployment = Deployment { topology, population, channel };

    let mut alloc = AllocationMatrix::new(2);
    alloc.assignment.insert(0, vec![0, 1]);
    alloc.satisfied.insert(0);
    let params = DpraParams { max_rounds: 10, epsilon_w: 1e-12 };
    let out = dpra_network(&deployment, &[alloc], &PowerMap::uniform(&deployment.topology), &params).unwrap();

    // Each PRB carries log2(8.5) = 3.087 bit/s; excess 1.675 bit/s. Neither
    // PRB is at or below the excess, so PRB 0 is shaved to 4.5 - 3.087 bit/s,
    // i.e. 2^1.413 - 1 = 1.6634 W. Round 2 changes nothing.
    let expected_p0 = (2f64).powf(4.5 - 8.5f64.log2()) - 1.0;
    assert!((out.powers.get(0, 0) - expected_p0).abs() < 1e-12);
    assert_eq!(out.powers.get(0, 1), 7.5);
    assert_eq!(out.rounds, 2);
    assert!(out.converged);
    let text = out.trace_text();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("round=1 total_power_w="));
    assert!(lines[1].starts_with("round=2 ") && lines[1].ends_with("load=2"));
    assert!(out.trace[1].max_change_w < 1e-12);
}
