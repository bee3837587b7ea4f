//! Sliding-window pipeline for series-shaped data.
//!
//! A series longer than the network's input window is cut into overlapping
//! windows; each window is encoded and presented on its own. For series-level
//! clustering, the per-window winners vote: the series joins the cluster of
//! the output line that won most of its windows (ties to the lowest line,
//! windows without a winner abstain).
//!
//! A sample whose length equals the window length yields exactly one window,
//! so plain vector datasets are the degenerate case of this pipeline.

use crate::encoder::{encode_sample, EncoderConfig};
use crate::error::Error;
use crate::network::{report_from_assignments, EvalReport, Network};
use crate::spike::SpikeVector;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Windowing {
    /// Window length in raw values (before channel expansion).
    pub length: usize,
    /// Step between window starts; `length` gives non-overlapping windows.
    pub stride: usize,
}

impl Windowing {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 || self.stride == 0 {
            return Err(Error::InvalidConfig(
                "window length and stride must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Start offsets of every window that fits in a series of `len` values.
    pub fn starts(&self, len: usize) -> impl Iterator<Item = usize> + '_ {
        let length = self.length;
        (0..)
            .map(move |k| k * self.stride)
            .take_while(move |&s| s + length <= len)
    }

    pub fn window_count(&self, len: usize) -> usize {
        self.starts(len).count()
    }
}

/// Encode every window of one series.
pub fn encode_series(
    values: &[f64],
    windowing: &Windowing,
    enc: &EncoderConfig,
) -> Result<Vec<SpikeVector>> {
    windowing.validate()?;
    if values.len() < windowing.length {
        return Err(Error::LengthMismatch {
            expected: windowing.length,
            got: values.len(),
        });
    }
    windowing
        .starts(values.len())
        .map(|s| encode_sample(&values[s..s + windowing.length], enc))
        .collect()
}

/// Series-level cluster assignment: majority vote over per-window winners.
pub fn series_cluster(
    net: &Network,
    values: &[f64],
    windowing: &Windowing,
    enc: &EncoderConfig,
) -> Result<Option<usize>> {
    let mut wins = vec![0usize; net.output_width()];
    let mut any = false;
    for window in encode_series(values, windowing, enc)? {
        if let Some(w) = net.forward_winner(&window)? {
            wins[w] += 1;
            any = true;
        }
    }
    if !any {
        return Ok(None);
    }
    let best = wins
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    Ok(best)
}

/// Evaluate a trained network on labeled series, clustering each series by
/// its majority window winner and scoring with the given label map.
pub fn evaluate_series(
    net: &Network,
    series: &[Vec<f64>],
    labels: &[i64],
    label_map: &[Option<i64>],
    windowing: &Windowing,
    enc: &EncoderConfig,
) -> Result<EvalReport> {
    if series.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: series.len(),
            got: labels.len(),
        });
    }
    if label_map.len() != net.output_width() {
        return Err(Error::LengthMismatch {
            expected: net.output_width(),
            got: label_map.len(),
        });
    }
    let mut assignments = Vec::with_capacity(series.len());
    for (values, &label) in series.iter().zip(labels) {
        assignments.push((label, series_cluster(net, values, windowing, enc)?));
    }
    Ok(report_from_assignments(
        &assignments,
        label_map,
        net.output_width(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_starts_cover_the_series() {
        let w = Windowing {
            length: 16,
            stride: 8,
        };
        let starts: Vec<usize> = w.starts(64).collect();
        assert_eq!(starts, vec![0, 8, 16, 24, 32, 40, 48]);
        assert_eq!(w.window_count(16), 1);
        assert_eq!(w.window_count(15), 0);
    }

    #[test]
    fn series_shorter_than_window_is_an_error() {
        let w = Windowing {
            length: 8,
            stride: 8,
        };
        let enc = EncoderConfig::new(8, 255.0);
        assert!(encode_series(&[1.0; 4], &w, &enc).is_err());
    }

    #[test]
    fn single_window_series_encodes_once() {
        let w = Windowing {
            length: 4,
            stride: 4,
        };
        let enc = EncoderConfig::new(8, 255.0);
        let out = encode_series(&[0.0, 255.0, 0.0, 255.0], &w, &enc).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], SpikeVector::from_opts(&[Some(7), Some(0), Some(7), Some(0)]));
    }
}
