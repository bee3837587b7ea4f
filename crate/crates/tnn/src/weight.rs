use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A synaptic weight in unsigned 8.8 fixed point.
///
/// The integer part (the *ramp*) is what neuron dynamics and the compiled
/// hardware see; the fractional bits let small STDP steps accumulate.
/// Floats never enter weight state, so training is bit-identical on every
/// platform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(u16);

impl Weight {
    pub const FRAC_BITS: u32 = 8;
    pub const SCALE: u16 = 1 << Self::FRAC_BITS;
    pub const ZERO: Weight = Weight(0);

    /// Raw 8.8 bits.
    pub const fn from_bits(bits: u16) -> Weight {
        Weight(bits)
    }

    pub const fn to_bits(self) -> u16 {
        self.0
    }

    /// Whole-number weight `v` (must be <= 255).
    pub const fn from_int(v: u16) -> Weight {
        Weight(v * Self::SCALE)
    }

    /// Exact conversion from a float; errors when `v` is negative, too large
    /// or not a multiple of 1/256.
    pub fn try_from_f64(v: f64) -> Result<Weight, Error> {
        if !v.is_finite() {
            return Err(Error::UnrepresentableWeight(v));
        }
        let scaled = v * f64::from(Self::SCALE);
        if scaled < 0.0 || scaled > f64::from(u16::MAX) || scaled.fract() != 0.0 {
            return Err(Error::UnrepresentableWeight(v));
        }
        Ok(Weight(scaled as u16))
    }

    /// Exact value as f64 (multiples of 1/256 are exactly representable).
    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / f64::from(Self::SCALE)
    }

    /// Integer part; the effective ramp height used by neuron bodies and
    /// compiled into hardware counters.
    pub const fn ramp(self) -> u32 {
        (self.0 >> Self::FRAC_BITS) as u32
    }

    /// `self + delta`, saturating at the integer bound `w_max`.
    pub fn add_clamped(self, delta: Weight, w_max: u32) -> Weight {
        let cap = (w_max as u32) << Self::FRAC_BITS;
        let sum = u32::from(self.0) + u32::from(delta.0);
        Weight(sum.min(cap) as u16)
    }

    /// `self - delta`, saturating at zero.
    pub fn sub_clamped(self, delta: Weight) -> Weight {
        Weight(self.0.saturating_sub(delta.0))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_float_round_trip() {
        let w = Weight::try_from_f64(3.5).unwrap();
        assert_eq!(w.to_bits(), 3 * 256 + 128);
        assert_eq!(w.to_f64(), 3.5);
        assert_eq!(w.ramp(), 3);
    }

    #[test]
    fn rejects_unrepresentable() {
        assert!(Weight::try_from_f64(0.1).is_err());
        assert!(Weight::try_from_f64(-0.5).is_err());
        assert!(Weight::try_from_f64(f64::NAN).is_err());
        assert!(Weight::try_from_f64(1.0 / 256.0).is_ok());
    }

    #[test]
    fn saturating_arithmetic() {
        // 6.8 is off the 1/256 grid; the nearest representable value behaves
        // the same way under clamping.
        let w = Weight::from_bits(6 * 256 + 204);
        let cap = Weight::try_from_f64(0.5).unwrap();
        assert_eq!(w.add_clamped(cap, 7), Weight::from_int(7));
        let low = Weight::try_from_f64(0.25).unwrap();
        assert_eq!(low.sub_clamped(Weight::try_from_f64(0.5).unwrap()), Weight::ZERO);
    }

    #[test]
    fn ramp_is_floor() {
        assert_eq!(Weight::try_from_f64(2.99609375).unwrap().ramp(), 2);
        assert_eq!(Weight::from_int(3).ramp(), 3);
        assert_eq!(Weight::ZERO.ramp(), 0);
    }
}
