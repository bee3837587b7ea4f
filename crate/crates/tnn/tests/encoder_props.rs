//! Encoder invariants.

use proptest::prelude::*;
use tnn::encoder::{encode_image, encode_value, encode_window, EncoderConfig, EncoderMode, Normalization};
use tnn::spike::SpikeTime;

fn cfg(window: u32, v_max: f64) -> EncoderConfig {
    EncoderConfig::new(window, v_max)
}

proptest! {
    /// Larger values never spike later (anti-monotone latency).
    #[test]
    fn latency_is_anti_monotone(
        window in 2u32..=32,
        v_max in 1.0f64..1e4,
        a in 0.0f64..1e4,
        b in 0.0f64..1e4,
    ) {
        let c = cfg(window, v_max);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t_lo = encode_value(lo, &c).unwrap();
        let t_hi = encode_value(hi, &c).unwrap();
        // hi >= lo must spike no later: time(hi) <= time(lo).
        prop_assert!(t_hi <= t_lo);
    }

    /// Every finite output lies in [0, window).
    #[test]
    fn outputs_stay_in_window(
        window in 2u32..=32,
        v_max in 1.0f64..1e4,
        v in 0.0f64..2e4,
    ) {
        let t = encode_value(v, &cfg(window, v_max)).unwrap();
        let tick = t.tick().unwrap();
        prop_assert!(tick < window);
    }

    /// Clamping: anything at or above full scale encodes like full scale.
    #[test]
    fn clamp_is_idempotent(window in 2u32..=32, v_max in 1.0f64..1e4, eps in 0.0f64..1e4) {
        let c = cfg(window, v_max);
        prop_assert_eq!(encode_value(v_max + eps, &c).unwrap(), SpikeTime::At(0));
        prop_assert_eq!(encode_value(v_max, &c).unwrap(), SpikeTime::At(0));
    }

    /// The on channel of v equals the off channel of (v_max - v).
    #[test]
    fn on_off_channels_are_complementary(
        window in 2u32..=32,
        v_max in 1.0f64..1e4,
        frac in 0.0f64..=1.0,
    ) {
        let c = EncoderConfig {
            mode: EncoderMode::OnOffCenter,
            ..cfg(window, v_max)
        };
        let v = frac * v_max;
        let direct = encode_image(&[v], &c).unwrap();
        let mirrored = encode_image(&[v_max - v], &c).unwrap();
        // direct = [on(v), off(v)]; mirrored = [on(v_max-v), off(v_max-v)].
        prop_assert_eq!(direct[0], mirrored[1]);
        prop_assert_eq!(direct[1], mirrored[0]);
    }

    /// Per-window normalization always produces endpoint spikes at the
    /// extremes of a non-constant window.
    #[test]
    fn per_window_norm_hits_endpoints(
        window in 2u32..=16,
        vals in prop::collection::vec(-1e3f64..1e3, 2..12),
    ) {
        let c = EncoderConfig {
            normalization: Normalization::PerWindow,
            ..cfg(window, 255.0)
        };
        let out = encode_window(&vals, &c).unwrap();
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > min {
            let argmax = vals.iter().position(|&v| v == max).unwrap();
            let argmin = vals.iter().position(|&v| v == min).unwrap();
            prop_assert_eq!(out[argmax], SpikeTime::At(0));
            prop_assert_eq!(out[argmin], SpikeTime::At(window - 1));
        }
    }
}
