//! The STDP rule table and weight initialization.
//!
//! Weights move by fixed increments decided purely by the relative timing of
//! the input spike `x` on a synapse and the post-WTA output spike `y` of its
//! neuron:
//!
//! | case | condition                   | update            |
//! |------|-----------------------------|-------------------|
//! | 1    | x, y finite and x <= y      | w + mu_capture    |
//! | 2    | x, y finite and x > y       | w - mu_backoff    |
//! | 3    | x finite, y absent          | w + mu_search     |
//! | 4    | x absent, y finite          | w - mu_backoff    |
//! | 5    | x absent, y absent          | unchanged         |
//!
//! All updates saturate into `[0, w_max]`. Exactly one case applies to every
//! `(x, y)` pair.

use crate::column::{ColumnOutput, ColumnState, WeightMatrix};
use crate::error::Error;
use crate::spike::{SpikeTime, SpikeVector};
use crate::weight::Weight;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// STDP step sizes plus the seed used for weight initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StdpParams {
    pub mu_capture: Weight,
    pub mu_backoff: Weight,
    pub mu_search: Weight,
    pub seed: u64,
}

impl StdpParams {
    pub fn validate(&self, w_max: u32) -> Result<()> {
        for (name, mu) in [
            ("mu_capture", self.mu_capture),
            ("mu_backoff", self.mu_backoff),
            ("mu_search", self.mu_search),
        ] {
            if mu.to_bits() == 0 || mu.ramp() > w_max {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, w_max={w_max}], got {mu}"
                )));
            }
        }
        Ok(())
    }
}

/// Apply one rule-table case to a single weight and clamp into `[0, w_max]`.
pub fn stdp_delta(
    x: SpikeTime,
    y: SpikeTime,
    w: Weight,
    params: &StdpParams,
    w_max: u32,
) -> Weight {
    match (x.tick(), y.tick()) {
        (Some(xt), Some(yt)) if xt <= yt => w.add_clamped(params.mu_capture, w_max),
        (Some(_), Some(_)) => w.sub_clamped(params.mu_backoff),
        (Some(_), None) => w.add_clamped(params.mu_search, w_max),
        (None, Some(_)) => w.sub_clamped(params.mu_backoff),
        (None, None) => w,
    }
}

/// Apply the rule table across a whole column for one presented sample.
///
/// Only the WTA winner has a finite `y`; losing neurons update through the
/// search / no-change cases, which is what ties learning to the code the
/// column actually emits.
pub fn stdp_update_column(
    state: &mut ColumnState,
    inputs: &SpikeVector,
    output: &ColumnOutput,
    params: &StdpParams,
) -> Result<()> {
    let cfg = state.config;
    if inputs.len() != cfg.p {
        return Err(Error::LengthMismatch {
            expected: cfg.p,
            got: inputs.len(),
        });
    }
    if output.post_wta_times.len() != cfg.q {
        return Err(Error::LengthMismatch {
            expected: cfg.q,
            got: output.post_wta_times.len(),
        });
    }
    for j in 0..cfg.q {
        let y = output.post_wta_times[j];
        for i in 0..cfg.p {
            let w = state.weights.get(i, j);
            state
                .weights
                .set(i, j, stdp_delta(inputs[i], y, w, params, cfg.w_max));
        }
    }
    Ok(())
}

/// Weight initialization schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "scheme", content = "value")]
pub enum InitScheme {
    /// Every synapse starts at the given weight.
    Constant(Weight),
    /// Integer parts drawn uniformly from `{0, ..., w_max}`, fractional bits
    /// zero. Uses the ChaCha8 generator seeded from `params.seed`, so the
    /// same seed always reproduces the same matrix.
    UniformRandom,
}

/// Build an initial `p x q` weight matrix. Deterministic for a fixed seed.
pub fn init_weights(
    p: usize,
    q: usize,
    scheme: InitScheme,
    params: &StdpParams,
    w_max: u32,
) -> WeightMatrix {
    match scheme {
        InitScheme::Constant(w) => WeightMatrix::filled(p, q, w),
        InitScheme::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut m = WeightMatrix::filled(p, q, Weight::ZERO);
            for i in 0..p {
                for j in 0..q {
                    let v: u32 = rng.gen_range(0..=w_max);
                    m.set(i, j, Weight::from_int(v as u16));
                }
            }
            m
        }
    }
}

/// Seed for the weights of one column inside a larger network, derived from
/// the base seed via independent ChaCha8 streams so every column gets its own
/// reproducible draw.
pub fn column_seed(base: u64, layer: usize, col: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(((layer as u64) << 32) | col as u64);
    rng.gen()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::column::ColumnConfig;

    fn params(cap: f64, back: f64, search: f64) -> StdpParams {
        StdpParams {
            mu_capture: Weight::try_from_f64(cap).unwrap(),
            mu_backoff: Weight::try_from_f64(back).unwrap(),
            mu_search: Weight::try_from_f64(search).unwrap(),
            seed: 1,
        }
    }

    #[test]
    fn capture_case_increments() {
        let p = params(0.5, 0.5, 0.5);
        let w = stdp_delta(
            SpikeTime::At(2),
            SpikeTime::At(4),
            Weight::from_int(3),
            &p,
            7,
        );
        assert_eq!(w, Weight::try_from_f64(3.5).unwrap());
    }

    #[test]
    fn capture_clamps_at_w_max() {
        let p = params(0.5, 0.5, 0.5);
        // Nearest representable value to 6.8 still clamps to 7.0.
        let w = stdp_delta(
            SpikeTime::At(1),
            SpikeTime::At(5),
            Weight::from_bits(6 * 256 + 205),
            &p,
            7,
        );
        assert_eq!(w, Weight::from_int(7));
    }

    #[test]
    fn backoff_clamps_at_zero() {
        let p = params(0.5, 0.5, 0.5);
        let w = stdp_delta(
            SpikeTime::Absent,
            SpikeTime::At(3),
            Weight::try_from_f64(0.25).unwrap(),
            &p,
            7,
        );
        assert_eq!(w, Weight::ZERO);
    }

    #[test]
    fn worked_two_by_two_update() {
        // inputs [0, absent], winner neuron 0 at y=1, all weights 3.0,
        // all mu 0.5: capture/backoff on the winner, search/no-change on
        // the loser.
        let cfg = ColumnConfig::new(2, 2, 4, 8);
        let mut state = ColumnState::with_constant_weights(cfg, Weight::from_int(3)).unwrap();
        let inputs = SpikeVector::from_opts(&[Some(0), None]);
        let output = ColumnOutput {
            raw_fire_times: vec![SpikeTime::At(1), SpikeTime::At(2)],
            winner: Some(0),
            post_wta_times: vec![SpikeTime::At(1), SpikeTime::Absent],
        };
        stdp_update_column(&mut state, &inputs, &output, &params(0.5, 0.5, 0.5)).unwrap();
        let f = |i, j| state.weights.get(i, j).to_f64();
        assert_eq!((f(0, 0), f(1, 0)), (3.5, 2.5));
        assert_eq!((f(0, 1), f(1, 1)), (3.5, 3.0));
    }

    #[test]
    fn no_winner_no_inputs_is_identity() {
        let cfg = ColumnConfig::new(2, 2, 4, 8);
        let mut state = ColumnState::with_constant_weights(cfg, Weight::from_int(3)).unwrap();
        let before = state.weights.clone();
        let output = ColumnOutput {
            raw_fire_times: vec![SpikeTime::Absent; 2],
            winner: None,
            post_wta_times: vec![SpikeTime::Absent; 2],
        };
        stdp_update_column(
            &mut state,
            &SpikeVector::absent(2),
            &output,
            &params(0.5, 0.5, 0.5),
        )
        .unwrap();
        assert_eq!(state.weights, before);
    }

    #[test]
    fn no_winner_finite_inputs_search_everywhere() {
        let cfg = ColumnConfig::new(2, 2, 4, 8);
        let mut state = ColumnState::with_constant_weights(cfg, Weight::from_int(3)).unwrap();
        let output = ColumnOutput {
            raw_fire_times: vec![SpikeTime::Absent; 2],
            winner: None,
            post_wta_times: vec![SpikeTime::Absent; 2],
        };
        stdp_update_column(
            &mut state,
            &SpikeVector::from_opts(&[Some(0), Some(3)]),
            &output,
            &params(0.5, 0.5, 0.25),
        )
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(state.weights.get(i, j).to_f64(), 3.25);
            }
        }
    }

    #[test]
    fn constant_init() {
        let m = init_weights(
            2,
            2,
            InitScheme::Constant(Weight::from_int(3)),
            &params(0.5, 0.5, 0.5),
            7,
        );
        assert!(m.as_slice().iter().all(|&w| w == Weight::from_int(3)));
    }

    #[test]
    fn random_init_is_deterministic_and_in_range() {
        let p = params(0.5, 0.5, 0.5);
        let a = init_weights(5, 3, InitScheme::UniformRandom, &p, 7);
        let b = init_weights(5, 3, InitScheme::UniformRandom, &p, 7);
        assert_eq!(a, b);
        for &w in a.as_slice() {
            assert!(w.ramp() <= 7);
            assert_eq!(w.to_bits() % u16::from(Weight::SCALE), 0);
        }
        let other = StdpParams { seed: 2, ..p };
        let c = init_weights(5, 3, InitScheme::UniformRandom, &other, 7);
        assert_ne!(a, c);
    }
}
