//! Synthetic dataset generators: desk-scale stand-ins for image and
//! time-series workloads.

use crate::dataset::LabeledDataset;
use crate::errors::{CliError, CliResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const AMPLITUDE: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// `classes` binary patterns with disjoint support blocks at full
    /// amplitude, plus additive uniform noise in [0, noise].
    OrthogonalPatterns,
    /// Two classes of sampled waveforms (sine vs square, two cycles per
    /// series) with per-sample phase jitter and additive uniform noise in
    /// [-noise, noise]; values clamp to [0, 255].
    SineVsSquare,
}

impl SynthKind {
    pub fn parse(s: &str) -> Option<SynthKind> {
        match s {
            "orthogonal-patterns" => Some(SynthKind::OrthogonalPatterns),
            "sine-vs-square" => Some(SynthKind::SineVsSquare),
            _ => None,
        }
    }
}

pub fn gen_synthetic(
    kind: SynthKind,
    classes: usize,
    n_per_class: usize,
    length: usize,
    noise: f64,
    seed: u64,
) -> CliResult<LabeledDataset> {
    if n_per_class == 0 || length == 0 {
        return Err(CliError::Config(
            "n_per_class and length must be positive".into(),
        ));
    }
    if noise < 0.0 || !noise.is_finite() {
        return Err(CliError::Config("noise must be a nonnegative number".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SynthKind::OrthogonalPatterns => {
            if classes < 2 || classes > length {
                return Err(CliError::Config(format!(
                    "orthogonal-patterns needs 2 <= classes <= length, got classes={classes} length={length}"
                )));
            }
            let block = length / classes;
            let mut labels = Vec::with_capacity(classes * n_per_class);
            let mut series = Vec::with_capacity(classes * n_per_class);
            // Classes interleave so online training sees them round-robin.
            for _ in 0..n_per_class {
                for c in 0..classes {
                    let mut row = vec![0.0f64; length];
                    for v in &mut row[c * block..(c + 1) * block] {
                        *v = AMPLITUDE;
                    }
                    if noise > 0.0 {
                        for v in &mut row {
                            *v = (*v + rng.gen_range(0.0..=noise)).min(AMPLITUDE);
                        }
                    }
                    labels.push(c as i64);
                    series.push(row);
                }
            }
            Ok(LabeledDataset {
                labels,
                series,
                width: length,
            })
        }
        SynthKind::SineVsSquare => {
            if classes != 2 {
                return Err(CliError::Config(format!(
                    "sine-vs-square is a two-class generator, got classes={classes}"
                )));
            }
            let mut labels = Vec::with_capacity(2 * n_per_class);
            let mut series = Vec::with_capacity(2 * n_per_class);
            for _ in 0..n_per_class {
                for class in 0..2i64 {
                    let phase: f64 = rng.gen_range(0.0..1.0);
                    let mut row = Vec::with_capacity(length);
                    for t in 0..length {
                        let angle =
                            std::f64::consts::TAU * (2.0 * t as f64 / length as f64 + phase);
                        let wave = if class == 0 {
                            (angle.sin() + 1.0) / 2.0
                        } else if angle.sin() >= 0.0 {
                            1.0
                        } else {
                            0.0
                        };
                        let mut v = wave * AMPLITUDE;
                        if noise > 0.0 {
                            v += rng.gen_range(-noise..=noise);
                        }
                        row.push(v.clamp(0.0, AMPLITUDE));
                    }
                    labels.push(class);
                    series.push(row);
                }
            }
            Ok(LabeledDataset {
                labels,
                series,
                width: length,
            })
        }
    }
}
