//! Multi-column layers and multi-layer networks: feed-forward wiring,
//! greedy layer-wise STDP training, post-hoc neuron labeling and evaluation.
//!
//! Layer `l+1` consumes the concatenated post-WTA spike times of layer `l`,
//! so everything downstream observes only the inhibited code a column
//! actually emits.

use crate::column::{column_forward, ColumnConfig, ColumnOutput, ColumnState};
use crate::error::Error;
use crate::spike::SpikeVector;
use crate::stdp::{column_seed, init_weights, stdp_update_column, InitScheme, StdpParams};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Contiguous slice of a layer's input vector consumed by one column.
/// Slices may overlap between columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSlice {
    pub start: usize,
    pub len: usize,
}

impl InputSlice {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub columns: Vec<ColumnConfig>,
    pub input_map: Vec<InputSlice>,
}

impl LayerSpec {
    /// One column consuming the whole layer input.
    pub fn single(column: ColumnConfig) -> LayerSpec {
        let slice = InputSlice {
            start: 0,
            len: column.p,
        };
        LayerSpec {
            columns: vec![column],
            input_map: vec![slice],
        }
    }

    pub fn output_width(&self) -> usize {
        self.columns.iter().map(|c| c.q).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// Width of the spike vector presented to layer 0.
    pub input_width: usize,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn single_column(input_width: usize, column: ColumnConfig) -> NetworkSpec {
        NetworkSpec {
            input_width,
            layers: vec![LayerSpec::single(column)],
        }
    }

    pub fn layer_input_width(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_width
        } else {
            self.layers[layer - 1].output_width()
        }
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, LayerSpec::output_width)
    }

    /// Checks every dimensional constraint up front so forwarding and
    /// training never hit a width error at run time:
    /// column configs are valid, each input slice fits inside its layer's
    /// input and matches its column's `p`, and each deeper layer's window
    /// covers the horizon of the layer before it (WTA times of layer `l`
    /// can be as late as `horizon - 1`).
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidConfig("network needs at least one layer".into()));
        }
        if self.input_width == 0 {
            return Err(Error::InvalidConfig("input width must be >= 1".into()));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.columns.is_empty() {
                return Err(Error::InvalidConfig(format!("layer {l} has no columns")));
            }
            if layer.columns.len() != layer.input_map.len() {
                return Err(Error::InvalidConfig(format!(
                    "layer {l}: {} columns but {} input slices",
                    layer.columns.len(),
                    layer.input_map.len()
                )));
            }
            let in_width = self.layer_input_width(l);
            for (c, (cfg, slice)) in layer.columns.iter().zip(&layer.input_map).enumerate() {
                cfg.validate()?;
                if slice.len != cfg.p {
                    return Err(Error::InvalidConfig(format!(
                        "layer {l} column {c}: slice length {} does not match p={}",
                        slice.len, cfg.p
                    )));
                }
                if slice.start + slice.len > in_width {
                    return Err(Error::InvalidConfig(format!(
                        "layer {l} column {c}: slice {}..{} exceeds layer input width {}",
                        slice.start,
                        slice.start + slice.len,
                        in_width
                    )));
                }
            }
            if l > 0 {
                let prev_max_horizon = self.layers[l - 1]
                    .columns
                    .iter()
                    .map(|c| c.horizon)
                    .max()
                    .unwrap_or(0);
                for (c, cfg) in layer.columns.iter().enumerate() {
                    if cfg.window < prev_max_horizon {
                        return Err(Error::InvalidConfig(format!(
                            "layer {l} column {c}: window {} cannot accept spikes up to \
                             horizon {} of the previous layer",
                            cfg.window, prev_max_horizon
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A network with live weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub spec: NetworkSpec,
    /// `layers[l][c]` is the state of column `c` in layer `l`.
    pub layers: Vec<Vec<ColumnState>>,
}

impl Network {
    /// Validate the spec and initialize every column's weights. Each column
    /// draws from its own seed stream derived from `params.seed`.
    pub fn new(spec: NetworkSpec, scheme: InitScheme, params: &StdpParams) -> Result<Network> {
        spec.validate()?;
        for layer in &spec.layers {
            for cfg in &layer.columns {
                params.validate(cfg.w_max)?;
            }
        }
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (l, layer) in spec.layers.iter().enumerate() {
            let mut states = Vec::with_capacity(layer.columns.len());
            for (c, cfg) in layer.columns.iter().enumerate() {
                let col_params = StdpParams {
                    seed: column_seed(params.seed, l, c),
                    ..*params
                };
                let weights = init_weights(cfg.p, cfg.q, scheme, &col_params, cfg.w_max);
                states.push(ColumnState::new(*cfg, weights)?);
            }
            layers.push(states);
        }
        Ok(Network { spec, layers })
    }

    pub fn output_width(&self) -> usize {
        self.spec.output_width()
    }

    fn layer_forward(&self, layer: usize, inputs: &SpikeVector) -> Result<Vec<ColumnOutput>> {
        let spec = &self.spec.layers[layer];
        let mut outs = Vec::with_capacity(spec.columns.len());
        for (state, slice) in self.layers[layer].iter().zip(&spec.input_map) {
            let sub = SpikeVector(inputs.as_slice()[slice.range()].to_vec());
            outs.push(column_forward(&sub, state)?);
        }
        Ok(outs)
    }

    fn concat_post_wta(outputs: &[ColumnOutput]) -> SpikeVector {
        SpikeVector(
            outputs
                .iter()
                .flat_map(|o| o.post_wta_times.iter().copied())
                .collect(),
        )
    }

    /// The spike vector arriving at `layer` for a given network input.
    pub fn layer_input(&self, layer: usize, inputs: &SpikeVector) -> Result<SpikeVector> {
        let mut cur = inputs.clone();
        for l in 0..layer {
            let outs = self.layer_forward(l, &cur)?;
            cur = Self::concat_post_wta(&outs);
        }
        Ok(cur)
    }

    /// Feed-forward evaluation; returns every layer's column outputs.
    pub fn forward(&self, inputs: &SpikeVector) -> Result<Vec<Vec<ColumnOutput>>> {
        if inputs.len() != self.spec.input_width {
            return Err(Error::LengthMismatch {
                expected: self.spec.input_width,
                got: inputs.len(),
            });
        }
        let mut all = Vec::with_capacity(self.spec.layers.len());
        let mut cur = inputs.clone();
        for l in 0..self.spec.layers.len() {
            let outs = self.layer_forward(l, &cur)?;
            cur = Self::concat_post_wta(&outs);
            all.push(outs);
        }
        Ok(all)
    }

    /// Winning output line of the final layer: the earliest post-WTA spike
    /// across the concatenated column outputs, lowest index on ties.
    pub fn forward_winner(&self, inputs: &SpikeVector) -> Result<Option<usize>> {
        let outs = self.forward(inputs)?;
        Ok(global_winner(outs.last().expect("validated: at least one layer")))
    }
}

/// Earliest finite post-WTA spike across a layer's concatenated outputs.
pub fn global_winner(layer_outputs: &[ColumnOutput]) -> Option<usize> {
    let mut best: Option<(usize, u32)> = None;
    let mut offset = 0;
    for out in layer_outputs {
        for (j, t) in out.post_wta_times.iter().enumerate() {
            if let Some(tick) = t.tick() {
                if best.map_or(true, |(_, b)| tick < b) {
                    best = Some((offset + j, tick));
                }
            }
        }
        offset += out.post_wta_times.len();
    }
    best.map(|(idx, _)| idx)
}

/// One epoch of one layer in the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub layer: usize,
    pub epoch: usize,
    /// L1 norm of the weight change over the epoch, in weight units.
    pub weight_delta_l1: f64,
}

/// Train a single layer with STDP while every other layer stays frozen.
pub fn train_layer(
    net: &mut Network,
    layer: usize,
    samples: &[SpikeVector],
    params: &StdpParams,
    epochs: usize,
) -> Result<Vec<TrainRecord>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if epochs < 1 {
        return Err(Error::InvalidConfig("epochs must be >= 1".into()));
    }
    let mut log = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let before: Vec<_> = net.layers[layer].iter().map(|s| s.weights.clone()).collect();
        for sample in samples {
            if sample.len() != net.spec.input_width {
                return Err(Error::LengthMismatch {
                    expected: net.spec.input_width,
                    got: sample.len(),
                });
            }
            let layer_in = net.layer_input(layer, sample)?;
            for c in 0..net.layers[layer].len() {
                let slice = net.spec.layers[layer].input_map[c];
                let sub = SpikeVector(layer_in.as_slice()[slice.range()].to_vec());
                let out = column_forward(&sub, &net.layers[layer][c])?;
                stdp_update_column(&mut net.layers[layer][c], &sub, &out, params)?;
            }
        }
        let delta: f64 = net.layers[layer]
            .iter()
            .zip(&before)
            .map(|(s, b)| s.weights.l1_distance(b))
            .sum();
        log.push(TrainRecord {
            layer,
            epoch,
            weight_delta_l1: delta,
        });
    }
    Ok(log)
}

/// Greedy layer-wise STDP training.
///
/// Layer 0 trains for all epochs while deeper layers stay frozen spectators;
/// then layer 1 trains on layer-0 outputs, and so on. Presentation order is
/// the dataset order, which makes training bit-reproducible.
pub fn train(
    net: &mut Network,
    samples: &[SpikeVector],
    params: &StdpParams,
    epochs: usize,
) -> Result<Vec<TrainRecord>> {
    let mut log = Vec::new();
    for l in 0..net.spec.layers.len() {
        log.extend(train_layer(net, l, samples, params, epochs)?);
    }
    Ok(log)
}

/// Majority-vote label for every final-layer output line.
///
/// A line that never wins maps to `None` (the reject class); ties go to the
/// lowest class id. Samples and labels must be aligned.
pub fn label_neurons(
    net: &Network,
    samples: &[SpikeVector],
    labels: &[i64],
) -> Result<Vec<Option<i64>>> {
    if samples.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: samples.len(),
            got: labels.len(),
        });
    }
    let width = net.output_width();
    let mut votes: Vec<BTreeMap<i64, usize>> = vec![BTreeMap::new(); width];
    for (sample, &label) in samples.iter().zip(labels) {
        if let Some(winner) = net.forward_winner(sample)? {
            *votes[winner].entry(label).or_insert(0) += 1;
        }
    }
    Ok(votes.iter().map(|v| majority_class(v)).collect())
}

/// Highest-count class; ties resolve to the lowest class id (BTreeMap
/// iterates classes in ascending order and we only replace on strictly
/// greater counts).
fn majority_class(votes: &BTreeMap<i64, usize>) -> Option<i64> {
    let mut best: Option<(i64, usize)> = None;
    for (&class, &count) in votes {
        if best.map_or(true, |(_, c)| count > c) {
            best = Some((class, count));
        }
    }
    best.map(|(class, _)| class)
}

/// Classification / clustering quality on a labeled sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Fraction of samples whose winner's label equals the true label;
    /// samples with no winner count as wrong.
    pub accuracy: f64,
    /// Mean dominant-class fraction over winner clusters; 0 when nothing fires.
    pub purity: f64,
    pub samples: usize,
    /// Sorted class ids; rows of `confusion` follow this order.
    pub classes: Vec<i64>,
    /// `confusion[class_index][neuron]` counts samples of that class won by
    /// that output line. Row sums count each class's samples that produced a
    /// winner; no-winner samples are tallied separately.
    pub confusion: Vec<Vec<usize>>,
    /// Per-class count of samples that produced no winner at all.
    pub no_winner: Vec<usize>,
}

/// Build a report from per-sample `(true class, winning line)` assignments.
pub(crate) fn report_from_assignments(
    assignments: &[(i64, Option<usize>)],
    label_map: &[Option<i64>],
    output_width: usize,
) -> EvalReport {
    let mut classes: Vec<i64> = assignments.iter().map(|&(c, _)| c).collect();
    classes.sort_unstable();
    classes.dedup();
    let class_index: BTreeMap<i64, usize> =
        classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut confusion = vec![vec![0usize; output_width]; classes.len()];
    let mut no_winner = vec![0usize; classes.len()];
    let mut correct = 0usize;
    for &(class, winner) in assignments {
        let k = class_index[&class];
        match winner {
            Some(n) => {
                confusion[k][n] += 1;
                if label_map.get(n).copied().flatten() == Some(class) {
                    correct += 1;
                }
            }
            None => no_winner[k] += 1,
        }
    }
    let n = assignments.len();
    let purity_hits: usize = (0..output_width)
        .map(|j| confusion.iter().map(|row| row[j]).max().unwrap_or(0))
        .sum();
    EvalReport {
        accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        purity: if n == 0 { 0.0 } else { purity_hits as f64 / n as f64 },
        samples: n,
        classes,
        confusion,
        no_winner,
    }
}

/// Evaluate a trained network against a labeled sample set using a label map
/// from [`label_neurons`] (built on a disjoint training split).
pub fn evaluate(
    net: &Network,
    samples: &[SpikeVector],
    labels: &[i64],
    label_map: &[Option<i64>],
) -> Result<EvalReport> {
    if samples.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: samples.len(),
            got: labels.len(),
        });
    }
    if label_map.len() != net.output_width() {
        return Err(Error::LengthMismatch {
            expected: net.output_width(),
            got: label_map.len(),
        });
    }
    let mut assignments = Vec::with_capacity(samples.len());
    for (sample, &label) in samples.iter().zip(labels) {
        assignments.push((label, net.forward_winner(sample)?));
    }
    Ok(report_from_assignments(
        &assignments,
        label_map,
        net.output_width(),
    ))
}
