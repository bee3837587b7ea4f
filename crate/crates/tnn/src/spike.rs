use serde::{Deserialize, Serialize};
use std::fmt;

/// A spike time on a discrete tick grid, or the absence of a spike.
///
/// `At(t)` orders numerically and `Absent` compares strictly greater than
/// every finite time, so `min` over a set of spike times picks the earliest
/// actual spike. The derived `Ord` gives exactly that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Option<u32>", into = "Option<u32>")]
pub enum SpikeTime {
    At(u32),
    Absent,
}

impl SpikeTime {
    /// The tick of a finite spike, `None` when absent.
    pub fn tick(self) -> Option<u32> {
        match self {
            SpikeTime::At(t) => Some(t),
            SpikeTime::Absent => None,
        }
    }

    pub fn is_absent(self) -> bool {
        matches!(self, SpikeTime::Absent)
    }
}

impl From<Option<u32>> for SpikeTime {
    fn from(v: Option<u32>) -> Self {
        match v {
            Some(t) => SpikeTime::At(t),
            None => SpikeTime::Absent,
        }
    }
}

impl From<SpikeTime> for Option<u32> {
    fn from(v: SpikeTime) -> Self {
        v.tick()
    }
}

impl fmt::Display for SpikeTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpikeTime::At(t) => write!(f, "{t}"),
            SpikeTime::Absent => write!(f, "-"),
        }
    }
}

/// A vector of spike times, one entry per input or output line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeVector(pub Vec<SpikeTime>);

impl SpikeVector {
    pub fn absent(len: usize) -> Self {
        SpikeVector(vec![SpikeTime::Absent; len])
    }

    /// Build from `Some(tick)` / `None` entries; handy in tests and fixtures.
    pub fn from_opts(opts: &[Option<u32>]) -> Self {
        SpikeVector(opts.iter().map(|&o| SpikeTime::from(o)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SpikeTime> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[SpikeTime] {
        &self.0
    }

    /// True when no line carries a spike.
    pub fn all_absent(&self) -> bool {
        self.0.iter().all(|t| t.is_absent())
    }
}

impl std::ops::Index<usize> for SpikeVector {
    type Output = SpikeTime;
    fn index(&self, i: usize) -> &SpikeTime {
        &self.0[i]
    }
}

impl From<Vec<SpikeTime>> for SpikeVector {
    fn from(v: Vec<SpikeTime>) -> Self {
        SpikeVector(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absent_sorts_after_every_finite_time() {
        assert!(SpikeTime::At(0) < SpikeTime::At(1));
        assert!(SpikeTime::At(u32::MAX) < SpikeTime::Absent);
        assert_eq!(
            [SpikeTime::Absent, SpikeTime::At(3), SpikeTime::At(1)]
                .iter()
                .min(),
            Some(&SpikeTime::At(1))
        );
    }

    #[test]
    fn serde_uses_null_for_absent() {
        let v = SpikeVector::from_opts(&[Some(2), None]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[2,null]");
        let back: SpikeVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
