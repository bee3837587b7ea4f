//! Input-to-spike encoders.
//!
//! One spike encodes one value: a value `v` in `[0, v_max]` becomes a single
//! spike at tick `round((v_max - v) * (T - 1) / v_max)`, so stronger inputs
//! spike earlier and a zero input spikes last. Rounding is half-away-from-zero
//! for cross-platform determinism.

use crate::error::Error;
use crate::spike::{SpikeTime, SpikeVector};
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderMode {
    /// One output line per input value.
    DirectLatency,
    /// Two output lines per input value: the on channel encodes `v`, the off
    /// channel encodes `v_max - v`.
    OnOffCenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Values are used as-is (clamped to `[0, v_max]` above, rejected below 0).
    Global,
    /// Each window is min-max rescaled onto `[0, v_max]` before encoding; a
    /// constant window maps every element to mid-scale.
    PerWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// Encoding window length in ticks (`T`); finite spike times lie in `[0, T)`.
    pub window: u32,
    /// Input full scale.
    pub v_max: f64,
    pub mode: EncoderMode,
    pub normalization: Normalization,
}

impl EncoderConfig {
    pub fn new(window: u32, v_max: f64) -> EncoderConfig {
        EncoderConfig {
            window,
            v_max,
            mode: EncoderMode::DirectLatency,
            normalization: Normalization::Global,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidConfig(format!(
                "encoder window must be >= 2 ticks, got {}",
                self.window
            )));
        }
        if !(self.v_max > 0.0) || !self.v_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "encoder v_max must be a positive finite number, got {}",
                self.v_max
            )));
        }
        Ok(())
    }

    /// Output lines produced per raw input value.
    pub fn channels(&self) -> usize {
        match self.mode {
            EncoderMode::DirectLatency => 1,
            EncoderMode::OnOffCenter => 2,
        }
    }
}

/// Encode a single value as a spike latency.
///
/// Values above `v_max` clamp to `v_max` (earliest spike); negative values
/// are a domain error.
pub fn encode_value(v: f64, cfg: &EncoderConfig) -> Result<SpikeTime> {
    cfg.validate()?;
    if v.is_nan() {
        return Err(Error::NonFiniteInput);
    }
    if v < 0.0 {
        return Err(Error::NegativeInput(v));
    }
    let v = v.min(cfg.v_max);
    let t = ((cfg.v_max - v) * f64::from(cfg.window - 1) / cfg.v_max).round();
    Ok(SpikeTime::At(t as u32))
}

/// Encode a window of values, applying the configured normalization first.
/// A constant window under per-window normalization encodes mid-scale
/// everywhere so it still reads as "flat" rather than dividing by zero.
pub fn encode_window(values: &[f64], cfg: &EncoderConfig) -> Result<SpikeVector> {
    cfg.validate()?;
    let normed = normalize_window(values, cfg)?;
    let times = normed
        .iter()
        .map(|&v| encode_value(v, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpikeVector(times))
}

/// Normalize a window of raw values according to the configured scheme,
/// yielding values in `[0, v_max]` ready for latency encoding.
pub fn normalize_window(values: &[f64], cfg: &EncoderConfig) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    match cfg.normalization {
        Normalization::Global => Ok(values.to_vec()),
        Normalization::PerWindow => {
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if max > min {
                Ok(values
                    .iter()
                    .map(|&v| (v - min) / (max - min) * cfg.v_max)
                    .collect())
            } else {
                Ok(vec![cfg.v_max / 2.0; values.len()])
            }
        }
    }
}

/// Full sample front-end: normalization followed by channel expansion.
/// This is what the training/evaluation pipeline feeds to layer 0.
pub fn encode_sample(values: &[f64], cfg: &EncoderConfig) -> Result<SpikeVector> {
    cfg.validate()?;
    let normed = normalize_window(values, cfg)?;
    encode_image(
        &normed,
        &EncoderConfig {
            normalization: Normalization::Global,
            ..*cfg
        },
    )
}

/// Encode a pixel vector. Direct-latency yields one line per pixel; the
/// on-off-center mode appends an inverted off channel, doubling the width.
pub fn encode_image(pixels: &[f64], cfg: &EncoderConfig) -> Result<SpikeVector> {
    cfg.validate()?;
    if pixels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut times = Vec::with_capacity(pixels.len() * cfg.channels());
    for &v in pixels {
        times.push(encode_value(v, cfg)?);
    }
    if cfg.mode == EncoderMode::OnOffCenter {
        for &v in pixels {
            let clamped = v.min(cfg.v_max);
            times.push(encode_value(cfg.v_max - clamped, cfg)?);
        }
    }
    Ok(SpikeVector(times))
}
