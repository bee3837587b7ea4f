//! STDP rule-table invariants, checked against an independent table walker
//! that computes in exact f64 arithmetic (multiples of 1/256 are exact).

use proptest::prelude::*;
use tnn::column::{ColumnConfig, ColumnOutput, ColumnState};
use tnn::spike::{SpikeTime, SpikeVector};
use tnn::stdp::{stdp_delta, stdp_update_column, StdpParams};
use tnn::weight::Weight;

/// Independently written rule-table walker used as the oracle.
fn oracle_delta(x: Option<u32>, y: Option<u32>, w: f64, p: &StdpParams, w_max: u32) -> f64 {
    let cap = |v: f64| v.min(f64::from(w_max)).max(0.0);
    match (x, y) {
        (Some(xt), Some(yt)) => {
            if xt <= yt {
                cap(w + p.mu_capture.to_f64())
            } else {
                cap(w - p.mu_backoff.to_f64())
            }
        }
        (Some(_), None) => cap(w + p.mu_search.to_f64()),
        (None, Some(_)) => cap(w - p.mu_backoff.to_f64()),
        (None, None) => w,
    }
}

fn arb_spike() -> impl Strategy<Value = Option<u32>> {
    prop_oneof![3 => (0u32..16).prop_map(Some), 1 => Just(None)]
}

fn arb_params() -> impl Strategy<Value = StdpParams> {
    (1u16..=7 * 256, 1u16..=7 * 256, 1u16..=7 * 256, any::<u64>()).prop_map(
        |(c, b, s, seed)| StdpParams {
            mu_capture: Weight::from_bits(c),
            mu_backoff: Weight::from_bits(b),
            mu_search: Weight::from_bits(s),
            seed,
        },
    )
}

proptest! {
    /// Fixed-point updates match the f64 table walker bit for bit.
    #[test]
    fn delta_matches_oracle(
        x in arb_spike(),
        y in arb_spike(),
        w_bits in 0u16..=7 * 256,
        params in arb_params(),
    ) {
        let w = Weight::from_bits(w_bits);
        let got = stdp_delta(SpikeTime::from(x), SpikeTime::from(y), w, &params, 7);
        let expect = oracle_delta(x, y, w.to_f64(), &params, 7);
        prop_assert_eq!(got.to_f64(), expect);
    }

    /// Results always stay inside [0, w_max].
    #[test]
    fn updates_stay_clamped(
        x in arb_spike(),
        y in arb_spike(),
        w_bits in 0u16..=7 * 256,
        params in arb_params(),
    ) {
        let got = stdp_delta(SpikeTime::from(x), SpikeTime::from(y), Weight::from_bits(w_bits), &params, 7);
        prop_assert!(got.to_f64() >= 0.0);
        prop_assert!(got.to_f64() <= 7.0);
    }

    /// Exactly one rule-table case applies to every (x, y) pair: the update
    /// is a total function and agrees with a one-case-at-a-time evaluation.
    #[test]
    fn case_partition_is_total_and_disjoint(x in arb_spike(), y in arb_spike()) {
        let case1 = matches!((x, y), (Some(a), Some(b)) if a <= b);
        let case2 = matches!((x, y), (Some(a), Some(b)) if a > b);
        let case3 = matches!((x, y), (Some(_), None));
        let case4 = matches!((x, y), (None, Some(_)));
        let case5 = matches!((x, y), (None, None));
        let hits = [case1, case2, case3, case4, case5]
            .iter()
            .filter(|&&c| c)
            .count();
        prop_assert_eq!(hits, 1);
    }

    /// Column updates are local: synapses whose (x, y, w) did not change are
    /// bit-identical after an update with different inputs elsewhere.
    #[test]
    fn updates_are_local(
        params in arb_params(),
        w_bits in prop::collection::vec(0u16..=7 * 256, 6),
        flip in 0usize..3,
    ) {
        let cfg = ColumnConfig::new(3, 2, 4, 8);
        let rows: Vec<Vec<Weight>> = (0..3)
            .map(|i| vec![Weight::from_bits(w_bits[i * 2]), Weight::from_bits(w_bits[i * 2 + 1])])
            .collect();
        let base = ColumnState::new(cfg, tnn::column::WeightMatrix::from_rows(&rows)).unwrap();
        let output = ColumnOutput {
            raw_fire_times: vec![SpikeTime::At(3), SpikeTime::At(5)],
            winner: Some(0),
            post_wta_times: vec![SpikeTime::At(3), SpikeTime::Absent],
        };
        let inputs_a = SpikeVector::from_opts(&[Some(1), Some(2), Some(7)]);
        let mut changed = vec![Some(1u32), Some(2), Some(7)];
        changed[flip] = None;
        let inputs_b = SpikeVector::from_opts(&changed);

        let mut state_a = base.clone();
        let mut state_b = base;
        stdp_update_column(&mut state_a, &inputs_a, &output, &params).unwrap();
        stdp_update_column(&mut state_b, &inputs_b, &output, &params).unwrap();
        // Rows other than `flip` saw identical (x, y, w) and must agree.
        for i in 0..3 {
            if i == flip {
                continue;
            }
            for j in 0..2 {
                prop_assert_eq!(state_a.weights.get(i, j), state_b.weights.get(i, j));
            }
        }
    }
}

/// Presenting one fixed pattern repeatedly drives the winner's weights on
/// spiking inputs to w_max within ceil(w_max / mu_capture) presentations.
#[test]
fn convergence_smoke() {
    let cfg = ColumnConfig::new(3, 1, 2, 8);
    let mut state = ColumnState::with_constant_weights(cfg, Weight::from_int(2)).unwrap();
    let params = StdpParams {
        mu_capture: Weight::try_from_f64(0.5).unwrap(),
        mu_backoff: Weight::try_from_f64(0.5).unwrap(),
        mu_search: Weight::try_from_f64(0.25).unwrap(),
        seed: 0,
    };
    // All inputs spike at t=0, so the single neuron fires (from weight 2,
    // theta 2 is reached at t=1) and every synapse is in the capture case.
    let inputs = SpikeVector::from_opts(&[Some(0), Some(0), Some(0)]);
    let bound = (f64::from(cfg.w_max) / params.mu_capture.to_f64()).ceil() as usize;
    for _ in 0..bound {
        let out = tnn::column::column_forward(&inputs, &state).unwrap();
        assert_eq!(out.winner, Some(0));
        stdp_update_column(&mut state, &inputs, &out, &params).unwrap();
    }
    for i in 0..3 {
        assert_eq!(state.weights.get(i, 0), Weight::from_int(7));
    }
}
