//! Single-column simulation: `q` excitatory neurons over a `p x q` synaptic
//! crossbar with ramp-no-leak (or step-no-leak) dynamics and 1-winner-take-all
//! lateral inhibition.
//!
//! Potentials are evaluated on integer ticks only, cycle-for-cycle identical
//! to the synchronous hardware produced by the netlist emitter.

use crate::error::Error;
use crate::spike::{SpikeTime, SpikeVector};
use crate::weight::Weight;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeuronModel {
    /// Each input spike starts a unit-slope ramp that saturates at the
    /// synapse's integer weight: potential(t) = sum_i min(max(t - x_i, 0), w_i).
    RampNoLeak,
    /// Each input spike adds its full integer weight at once:
    /// potential(t) = sum over spikes with x_i <= t of w_i.
    StepNoLeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnConfig {
    /// Input line count.
    pub p: usize,
    /// Neuron count.
    pub q: usize,
    /// Firing threshold (>= 1).
    pub theta: u32,
    /// Encoding window in ticks; finite input spike times lie in `[0, window)`.
    pub window: u32,
    pub model: NeuronModel,
    /// Maximum integer weight.
    pub w_max: u32,
    /// Simulation horizon in ticks; fire times lie in `[0, horizon)`.
    pub horizon: u32,
}

pub const DEFAULT_W_MAX: u32 = 7;

impl ColumnConfig {
    /// Ramp-no-leak column with default weight range and the provably
    /// complete horizon `window + w_max` (a ramp started by the latest
    /// possible spike has saturated by then).
    pub fn new(p: usize, q: usize, theta: u32, window: u32) -> ColumnConfig {
        ColumnConfig {
            p,
            q,
            theta,
            window,
            model: NeuronModel::RampNoLeak,
            w_max: DEFAULT_W_MAX,
            horizon: window + DEFAULT_W_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q < 1 {
            return Err(Error::InvalidConfig(format!(
                "column needs p >= 1 and q >= 1, got p={} q={}",
                self.p, self.q
            )));
        }
        if self.theta < 1 {
            return Err(Error::InvalidConfig("theta must be >= 1".into()));
        }
        if self.window < 2 {
            return Err(Error::InvalidConfig(format!(
                "window must be >= 2 ticks, got {}",
                self.window
            )));
        }
        if self.w_max < 1 || self.w_max > 255 {
            return Err(Error::InvalidConfig(format!(
                "w_max must be in [1, 255], got {}",
                self.w_max
            )));
        }
        if self.horizon < self.window {
            return Err(Error::InvalidConfig(format!(
                "horizon {} must be >= window {}",
                self.horizon, self.window
            )));
        }
        Ok(())
    }
}

/// A `p x q` weight matrix, input-major: entry `(i, j)` is the weight of the
/// synapse from input line `i` to neuron `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMatrix {
    p: usize,
    q: usize,
    data: Vec<Weight>,
}

impl WeightMatrix {
    pub fn filled(p: usize, q: usize, w: Weight) -> WeightMatrix {
        WeightMatrix {
            p,
            q,
            data: vec![w; p * q],
        }
    }

    pub fn from_rows(rows: &[Vec<Weight>]) -> WeightMatrix {
        let p = rows.len();
        let q = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(p * q);
        for row in rows {
            assert_eq!(row.len(), q, "ragged weight rows");
            data.extend_from_slice(row);
        }
        WeightMatrix { p, q, data }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.data[i * self.q + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: Weight) {
        self.data[i * self.q + j] = w;
    }

    /// Weights of neuron `j`, one per input line.
    pub fn neuron_weights(&self, j: usize) -> impl Iterator<Item = Weight> + '_ {
        (0..self.p).map(move |i| self.get(i, j))
    }

    pub fn as_slice(&self) -> &[Weight] {
        &self.data
    }

    /// L1 distance between two matrices in weight units (exact: raw bit
    /// distance divided by the fixed-point scale).
    pub fn l1_distance(&self, other: &WeightMatrix) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        let raw: u64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| u64::from(a.to_bits().abs_diff(b.to_bits())))
            .sum();
        raw as f64 / f64::from(Weight::SCALE)
    }
}

/// A column's full state: configuration plus the synaptic crossbar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnState {
    pub config: ColumnConfig,
    pub weights: WeightMatrix,
}

impl ColumnState {
    pub fn new(config: ColumnConfig, weights: WeightMatrix) -> Result<ColumnState> {
        config.validate()?;
        if weights.p() != config.p || weights.q() != config.q {
            return Err(Error::LengthMismatch {
                expected: config.p * config.q,
                got: weights.p() * weights.q(),
            });
        }
        Ok(ColumnState { config, weights })
    }

    /// All weights set to the same constant.
    pub fn with_constant_weights(config: ColumnConfig, w: Weight) -> Result<ColumnState> {
        let m = WeightMatrix::filled(config.p, config.q, w);
        ColumnState::new(config, m)
    }
}

/// The column's response to one input presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOutput {
    /// Per-neuron fire times before lateral inhibition.
    pub raw_fire_times: Vec<SpikeTime>,
    /// Index of the earliest-firing neuron (lowest index on ties), if any fired.
    pub winner: Option<usize>,
    /// Post-inhibition times: the winner keeps its time, all others are absent.
    pub post_wta_times: Vec<SpikeTime>,
}

fn check_inputs(inputs: &SpikeVector, cfg: &ColumnConfig) -> Result<()> {
    if inputs.len() != cfg.p {
        return Err(Error::LengthMismatch {
            expected: cfg.p,
            got: inputs.len(),
        });
    }
    for t in inputs.iter() {
        if let Some(tick) = t.tick() {
            if tick >= cfg.window {
                return Err(Error::TimeOutsideWindow {
                    time: tick,
                    window: cfg.window,
                });
            }
        }
    }
    Ok(())
}

/// Earliest tick in `[0, horizon)` at which the summed potential reaches
/// `theta`, computed with a difference-array sweep (O(p + horizon)).
fn fire_time_sweep<I>(inputs: &SpikeVector, ramps: I, cfg: &ColumnConfig) -> SpikeTime
where
    I: Iterator<Item = u32>,
{
    let h = cfg.horizon as usize;
    match cfg.model {
        NeuronModel::RampNoLeak => {
            // delta[t] = number of ramps still climbing at tick t; a ramp
            // started by a spike at x climbs on ticks x+1 ..= x+ramp.
            let mut delta = vec![0i64; h + 1];
            for (x, r) in inputs.iter().zip(ramps) {
                let Some(x) = x.tick() else { continue };
                if r == 0 {
                    continue;
                }
                let start = x as usize + 1;
                if start > h {
                    continue;
                }
                let end = ((x as u64 + u64::from(r)) as usize).min(h);
                delta[start] += 1;
                if end < h {
                    delta[end + 1] -= 1;
                }
            }
            let mut slope = 0i64;
            let mut potential = 0i64;
            for t in 0..h {
                slope += delta[t];
                potential += slope;
                // slope at tick t applies from tick t onward, and potential
                // accumulates one slope step per tick; potential(0) = 0.
                if potential >= i64::from(cfg.theta) {
                    return SpikeTime::At(t as u32);
                }
            }
            SpikeTime::Absent
        }
        NeuronModel::StepNoLeak => {
            let mut jump = vec![0i64; h];
            for (x, r) in inputs.iter().zip(ramps) {
                let Some(x) = x.tick() else { continue };
                let x = x as usize;
                if x < h {
                    jump[x] += i64::from(r);
                }
            }
            let mut potential = 0i64;
            for t in 0..h {
                potential += jump[t];
                if potential >= i64::from(cfg.theta) {
                    return SpikeTime::At(t as u32);
                }
            }
            SpikeTime::Absent
        }
    }
}

/// Fire time of a single neuron given its input spikes and synapse weights.
pub fn neuron_fire_time(
    inputs: &SpikeVector,
    weights: &[Weight],
    cfg: &ColumnConfig,
) -> Result<SpikeTime> {
    cfg.validate()?;
    if weights.len() != cfg.p {
        return Err(Error::LengthMismatch {
            expected: cfg.p,
            got: weights.len(),
        });
    }
    check_inputs(inputs, cfg)?;
    Ok(fire_time_sweep(inputs, weights.iter().map(|w| w.ramp()), cfg))
}

/// 1-winner-take-all: the earliest finite time wins, lowest index on ties;
/// losers' spikes are suppressed to absent.
pub fn wta_select(raw_fire_times: &[SpikeTime]) -> (Option<usize>, Vec<SpikeTime>) {
    let mut winner: Option<(usize, u32)> = None;
    for (j, t) in raw_fire_times.iter().enumerate() {
        if let Some(tick) = t.tick() {
            if winner.map_or(true, |(_, best)| tick < best) {
                winner = Some((j, tick));
            }
        }
    }
    let post = raw_fire_times
        .iter()
        .enumerate()
        .map(|(j, &t)| match winner {
            Some((w, _)) if w == j => t,
            _ => SpikeTime::Absent,
        })
        .collect();
    (winner.map(|(j, _)| j), post)
}

/// Evaluate a full column: per-neuron fire times followed by WTA inhibition.
pub fn column_forward(inputs: &SpikeVector, state: &ColumnState) -> Result<ColumnOutput> {
    let cfg = &state.config;
    cfg.validate()?;
    check_inputs(inputs, cfg)?;
    let raw: Vec<SpikeTime> = (0..cfg.q)
        .map(|j| fire_time_sweep(inputs, state.weights.neuron_weights(j).map(|w| w.ramp()), cfg))
        .collect();
    let (winner, post) = wta_select(&raw);
    Ok(ColumnOutput {
        raw_fire_times: raw,
        winner,
        post_wta_times: post,
    })
}
