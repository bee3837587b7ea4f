//! Run configuration: the JSON file format and its resolution into
//! validated library types.
//!
//! The file mirrors the run's knobs directly; omitted fields take the
//! documented defaults (column window from the encoder, horizon from
//! window + w_max, one full-width slice per single-column layer).

use crate::dataset::DataFormat;
use crate::errors::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tnn::column::{ColumnConfig, NeuronModel, DEFAULT_W_MAX};
use tnn::encoder::EncoderConfig;
use tnn::network::{InputSlice, LayerSpec, NetworkSpec};
use tnn::stdp::{InitScheme, StdpParams};
use tnn::timeseries::Windowing;
use tnn::weight::Weight;
use tnn_hw::TechSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfigFile {
    pub encoder: EncoderConfig,
    #[serde(default)]
    pub windowing: Option<WindowingRaw>,
    pub network: NetworkRaw,
    pub learning: LearningRaw,
    pub epochs: usize,
    #[serde(default)]
    pub init: Option<InitRaw>,
    pub dataset: DatasetRef,
    #[serde(default = "default_tech")]
    pub tech: TechSpec,
    pub seed: u64,
}

fn default_tech() -> TechSpec {
    TechSpec::Node7Tnn7
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowingRaw {
    #[serde(default)]
    pub length: Option<usize>,
    #[serde(default)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkRaw {
    pub input_width: usize,
    pub layers: Vec<LayerRaw>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerRaw {
    pub columns: Vec<ColumnRaw>,
    #[serde(default)]
    pub input_map: Option<Vec<InputSlice>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ColumnRaw {
    #[serde(default)]
    pub p: Option<usize>,
    pub q: usize,
    pub theta: u32,
    #[serde(default)]
    pub window: Option<u32>,
    #[serde(default)]
    pub model: Option<NeuronModel>,
    #[serde(default)]
    pub w_max: Option<u32>,
    #[serde(default)]
    pub horizon: Option<u32>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LearningRaw {
    pub mu_capture: f64,
    pub mu_backoff: f64,
    pub mu_search: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "scheme")]
pub enum InitRaw {
    Constant { value: f64 },
    UniformRandom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRef {
    pub path: PathBuf,
    pub format: DataFormat,
    #[serde(default)]
    pub has_header: bool,
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub encoder: EncoderConfig,
    pub windowing: Windowing,
    pub spec: NetworkSpec,
    pub params: StdpParams,
    pub init: InitScheme,
    pub epochs: usize,
    pub dataset: DatasetRef,
    pub tech: TechSpec,
    pub seed: u64,
}

pub fn load_config(path: &Path) -> CliResult<(RunConfigFile, Vec<u8>)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: RunConfigFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((file, bytes))
}

fn weight_from(v: f64, what: &str) -> CliResult<Weight> {
    Weight::try_from_f64(v)
        .map_err(|_| CliError::Config(format!("{what} = {v} is not representable in 8.8 fixed point")))
}

impl RunConfigFile {
    /// Validate everything and fill in defaults. `seed_override` comes from
    /// the `--seed` flag.
    pub fn resolve(&self, seed_override: Option<u64>) -> CliResult<Resolved> {
        self.encoder
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.epochs < 1 {
            return Err(CliError::Config("epochs must be >= 1".into()));
        }
        let seed = seed_override.unwrap_or(self.seed);
        let channels = self.encoder.channels();

        // Windowing defaults to one full-width window over the raw values.
        let raw_len_default = self.network.input_width / channels;
        let (length, stride) = match self.windowing {
            Some(w) => {
                let length = w.length.unwrap_or(raw_len_default);
                (length, w.stride.unwrap_or(length))
            }
            None => (raw_len_default, raw_len_default),
        };
        let windowing = Windowing { length, stride };
        windowing
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if length * channels != self.network.input_width {
            return Err(CliError::Config(format!(
                "window length {length} x {channels} encoder channel(s) does not match \
                 network input width {}",
                self.network.input_width
            )));
        }

        // Column defaults: layer-0 windows follow the encoder; deeper layers
        // must accept the previous layer's horizon.
        let mut layers = Vec::with_capacity(self.network.layers.len());
        let mut prev_horizon = self.encoder.window;
        for (l, layer) in self.network.layers.iter().enumerate() {
            let layer_width = if l == 0 {
                self.network.input_width
            } else {
                layers
                    .last()
                    .map(|ls: &LayerSpec| ls.output_width())
                    .unwrap_or(0)
            };
            let input_map: Vec<InputSlice> = match &layer.input_map {
                Some(map) => map.clone(),
                None => layer
                    .columns
                    .iter()
                    .map(|c| InputSlice {
                        start: 0,
                        len: c.p.unwrap_or(layer_width),
                    })
                    .collect(),
            };
            if input_map.len() != layer.columns.len() {
                return Err(CliError::Config(format!(
                    "layer {l}: {} columns but {} input slices",
                    layer.columns.len(),
                    input_map.len()
                )));
            }
            let mut columns = Vec::with_capacity(layer.columns.len());
            for (raw, slice) in layer.columns.iter().zip(&input_map) {
                let p = raw.p.unwrap_or(slice.len);
                let window = raw.window.unwrap_or(prev_horizon);
                let w_max = raw.w_max.unwrap_or(DEFAULT_W_MAX);
                let cfg = ColumnConfig {
                    p,
                    q: raw.q,
                    theta: raw.theta,
                    window,
                    model: raw.model.unwrap_or(NeuronModel::RampNoLeak),
                    w_max,
                    horizon: raw.horizon.unwrap_or(window + w_max),
                };
                columns.push(cfg);
            }
            prev_horizon = columns.iter().map(|c| c.horizon).max().unwrap_or(prev_horizon);
            layers.push(LayerSpec { columns, input_map });
        }
        let spec = NetworkSpec {
            input_width: self.network.input_width,
            layers,
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        // Layer-0 windows must cover the encoder's output times.
        for cfg in &spec.layers[0].columns {
            if cfg.window < self.encoder.window {
                return Err(CliError::Config(format!(
                    "layer 0 column window {} is smaller than the encoder window {}",
                    cfg.window, self.encoder.window
                )));
            }
        }

        let params = StdpParams {
            mu_capture: weight_from(self.learning.mu_capture, "mu_capture")?,
            mu_backoff: weight_from(self.learning.mu_backoff, "mu_backoff")?,
            mu_search: weight_from(self.learning.mu_search, "mu_search")?,
            seed: self.learning.seed.unwrap_or(seed),
        };
        for layer in &spec.layers {
            for cfg in &layer.columns {
                params
                    .validate(cfg.w_max)
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        let init = match self.init {
            None | Some(InitRaw::UniformRandom) => InitScheme::UniformRandom,
            Some(InitRaw::Constant { value }) => {
                InitScheme::Constant(weight_from(value, "init value")?)
            }
        };
        Ok(Resolved {
            encoder: self.encoder,
            windowing,
            spec,
            params,
            init,
            epochs: self.epochs,
            dataset: self.dataset.clone(),
            tech: self.tech,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "encoder": {
                "window": 8, "v_max": 255.0,
                "mode": "direct-latency", "normalization": "global"
            },
            "network": {
                "input_width": 16,
                "layers": [ { "columns": [ { "q": 4, "theta": 12 } ] } ]
            },
            "learning": { "mu_capture": 0.5, "mu_backoff": 0.5, "mu_search": 0.25 },
            "epochs": 10,
            "dataset": { "path": "data.csv", "format": "csv-labeled" },
            "seed": 42
        })
    }

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let file: RunConfigFile = serde_json::from_value(minimal_json()).unwrap();
        let r = file.resolve(None).unwrap();
        assert_eq!(r.windowing.length, 16);
        assert_eq!(r.windowing.stride, 16);
        let cfg = r.spec.layers[0].columns[0];
        assert_eq!(cfg.p, 16);
        assert_eq!(cfg.window, 8);
        assert_eq!(cfg.horizon, 15);
        assert_eq!(cfg.w_max, 7);
        assert_eq!(r.tech, TechSpec::Node7Tnn7);
        assert_eq!(r.params.seed, 42);
    }

    #[test]
    fn seed_override_wins() {
        let file: RunConfigFile = serde_json::from_value(minimal_json()).unwrap();
        let r = file.resolve(Some(7)).unwrap();
        assert_eq!(r.seed, 7);
        assert_eq!(r.params.seed, 7);
    }

    #[test]
    fn unrepresentable_mu_is_a_config_error() {
        let mut v = minimal_json();
        v["learning"]["mu_capture"] = serde_json::json!(0.1);
        let file: RunConfigFile = serde_json::from_value(v).unwrap();
        assert!(matches!(file.resolve(None), Err(CliError::Config(_))));
    }

    #[test]
    fn window_width_mismatch_is_a_config_error() {
        let mut v = minimal_json();
        v["windowing"] = serde_json::json!({ "length": 10 });
        let file: RunConfigFile = serde_json::from_value(v).unwrap();
        assert!(matches!(file.resolve(None), Err(CliError::Config(_))));
    }

    #[test]
    fn on_off_mode_halves_the_raw_window() {
        let mut v = minimal_json();
        v["encoder"]["mode"] = serde_json::json!("on-off-center");
        let file: RunConfigFile = serde_json::from_value(v).unwrap();
        let r = file.resolve(None).unwrap();
        assert_eq!(r.windowing.length, 8);
        assert_eq!(r.spec.input_width, 16);
    }

    #[test]
    fn two_layer_defaults_chain_the_horizon() {
        let mut v = minimal_json();
        v["network"]["layers"] = serde_json::json!([
            { "columns": [ { "q": 4, "theta": 12 } ] },
            { "columns": [ { "q": 2, "theta": 3 } ] }
        ]);
        let file: RunConfigFile = serde_json::from_value(v).unwrap();
        let r = file.resolve(None).unwrap();
        let l1 = r.spec.layers[1].columns[0];
        assert_eq!(l1.p, 4);
        assert_eq!(l1.window, 15); // layer-0 horizon
        assert_eq!(l1.horizon, 22);
    }
}
