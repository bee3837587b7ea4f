//! Netlist-vs-simulator equivalence and structural invariants on randomly
//! generated columns. The full-size randomized equivalence run lives in the
//! acceptance suite; this is the per-crate regression version.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tnn::column::{column_forward, ColumnConfig, ColumnState, NeuronModel, WeightMatrix};
use tnn::spike::{SpikeTime, SpikeVector};
use tnn::weight::Weight;
use tnn_hw::{emit_netlist, emit_netlist_with_cap, simulate_netlist, HwError};

fn random_column(rng: &mut ChaCha8Rng) -> ColumnState {
    let p = rng.gen_range(1..=8);
    let q = rng.gen_range(1..=8);
    let model = if rng.gen_bool(0.5) {
        NeuronModel::RampNoLeak
    } else {
        NeuronModel::StepNoLeak
    };
    let theta = rng.gen_range(1..=(p as u32 * 7).min(20));
    let cfg = ColumnConfig {
        model,
        ..ColumnConfig::new(p, q, theta, 8)
    };
    let rows: Vec<Vec<Weight>> = (0..p)
        .map(|_| {
            (0..q)
                .map(|_| Weight::from_bits(rng.gen_range(0..=7 * 256)))
                .collect()
        })
        .collect();
    ColumnState::new(cfg, WeightMatrix::from_rows(&rows)).unwrap()
}

fn random_inputs(rng: &mut ChaCha8Rng, p: usize, window: u32) -> SpikeVector {
    SpikeVector(
        (0..p)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    SpikeTime::Absent
                } else {
                    SpikeTime::At(rng.gen_range(0..window))
                }
            })
            .collect(),
    )
}

#[test]
fn random_columns_match_behavioral_simulator() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC01);
    for trial in 0..40 {
        let state = random_column(&mut rng);
        let nl = emit_netlist(&state).unwrap();
        nl.lint().unwrap();
        for round in 0..10 {
            let inputs = random_inputs(&mut rng, state.config.p, state.config.window);
            let hw = simulate_netlist(&nl, &inputs, state.config.horizon).unwrap();
            let sw = column_forward(&inputs, &state).unwrap();
            assert_eq!(
                hw, sw.post_wta_times,
                "trial {trial} round {round}: {:?}",
                state.config
            );
        }
    }
}

#[test]
fn short_horizon_columns_still_match() {
    // horizon == window < window + w_max exercises the hardware horizon gate:
    // a crossing after the horizon must stay silent in both worlds.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC02);
    for _ in 0..20 {
        let p = rng.gen_range(1..=6);
        let q = rng.gen_range(1..=4);
        let cfg = ColumnConfig {
            horizon: 8,
            theta: rng.gen_range(2..=14),
            ..ColumnConfig::new(p, q, 1, 8)
        };
        let rows: Vec<Vec<Weight>> = (0..p)
            .map(|_| (0..q).map(|_| Weight::from_int(rng.gen_range(0..=7))).collect())
            .collect();
        let state = ColumnState::new(cfg, WeightMatrix::from_rows(&rows)).unwrap();
        let nl = emit_netlist(&state).unwrap();
        for _ in 0..10 {
            let inputs = random_inputs(&mut rng, p, 8);
            let hw = simulate_netlist(&nl, &inputs, 20).unwrap();
            let sw = column_forward(&inputs, &state).unwrap();
            assert_eq!(hw, sw.post_wta_times);
        }
    }
}

#[test]
fn reemission_is_byte_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC03);
    let state = random_column(&mut rng);
    let a = emit_netlist(&state).unwrap().to_text();
    let b = emit_netlist(&state).unwrap().to_text();
    assert_eq!(a, b);
    assert!(a.ends_with("endmodule\n"));
    assert!(!a.contains('\r'));
}

#[test]
fn emission_cap_is_enforced() {
    let cfg = ColumnConfig::new(70, 60, 4, 8); // 4200 synapses > 4096
    let state = ColumnState::with_constant_weights(cfg, Weight::from_int(1)).unwrap();
    assert!(matches!(
        emit_netlist(&state),
        Err(HwError::EmissionCapExceeded { .. })
    ));
    assert!(emit_netlist_with_cap(&state, 4200).is_ok());
}

#[test]
fn emitted_netlists_pass_lint_across_shapes() {
    for (p, q, theta, model) in [
        (1usize, 1usize, 1u32, NeuronModel::RampNoLeak),
        (1, 8, 3, NeuronModel::StepNoLeak),
        (8, 1, 20, NeuronModel::RampNoLeak),
        (5, 3, 7, NeuronModel::StepNoLeak),
        (16, 4, 50, NeuronModel::RampNoLeak),
    ] {
        let cfg = ColumnConfig {
            model,
            ..ColumnConfig::new(p, q, theta, 8)
        };
        let state = ColumnState::with_constant_weights(cfg, Weight::from_int(5)).unwrap();
        let nl = emit_netlist(&state).unwrap();
        nl.lint().unwrap();
        assert_eq!(nl.inputs.len(), p);
        assert_eq!(nl.outputs.len(), q);
        assert!(nl.gate_count() > 0);
    }
}

#[test]
fn netlist_text_round_trips_through_serde() {
    let cfg = ColumnConfig::new(2, 2, 3, 8);
    let state = ColumnState::with_constant_weights(cfg, Weight::from_int(3)).unwrap();
    let nl = emit_netlist(&state).unwrap();
    let json = serde_json::to_string(&nl).unwrap();
    let back: tnn_hw::Netlist = serde_json::from_str(&json).unwrap();
    assert_eq!(back, nl);
    assert_eq!(back.to_text(), nl.to_text());
}
