//! The train -> label -> evaluate -> netlist -> equivalence -> PPA pipeline
//! and its on-disk artifacts.
//!
//! Every artifact is deterministic for a fixed (config, seed): JSON is
//! written with stable field order and no timestamps, and netlist text is
//! byte-reproducible, so reruns can be compared with a plain diff.

use crate::config::Resolved;
use crate::dataset::{load_dataset, stratified_split, LabeledDataset};
use crate::errors::{CliError, CliResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use tnn::column::column_forward;
use tnn::encoder::EncoderConfig;
use tnn::network::{label_neurons, train, EvalReport, Network, TrainRecord};
use tnn::spike::SpikeVector;
use tnn::timeseries::{evaluate_series, Windowing};
use tnn_hw::{emit_netlist_with_cap, estimate_gates, estimate_ppa, simulate_netlist, Netlist, PpaReport, TechSpec, DEFAULT_EMIT_CAP};

/// Trained model artifact; everything `eval` and `genrtl` need to rerun.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub encoder: EncoderConfig,
    pub windowing: Windowing,
    pub network: Network,
    pub label_map: Vec<Option<i64>>,
    pub tech: TechSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageStatus {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivSummary {
    pub passed: usize,
    pub total: usize,
}

/// Run manifest: enough to reproduce the run and audit which stages ran.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub stages: Vec<StageStatus>,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivSummary>,
}

pub struct PipelineOptions {
    pub skip_hw: bool,
    pub emit_all_layers: bool,
    pub emit_cap: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            skip_hw: false,
            emit_all_layers: false,
            emit_cap: DEFAULT_EMIT_CAP,
        }
    }
}

pub struct PipelineOutcome {
    pub eval: EvalReport,
    pub ppa: Option<PpaReport>,
    pub equivalence: Option<EquivSummary>,
    pub train_log: Vec<TrainRecord>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::stage("write", format!("{}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::stage("write", format!("{}: {e}", path.display())))
}

/// Cut one series into encoded windows, one spike vector per window.
pub fn encode_windows(
    values: &[f64],
    windowing: &Windowing,
    enc: &EncoderConfig,
) -> CliResult<Vec<SpikeVector>> {
    tnn::timeseries::encode_series(values, windowing, enc)
        .map_err(|e| CliError::stage("encode", e))
}

/// Flatten a set of series into (windows, per-window labels) in dataset
/// order; this is the training presentation order.
pub fn encode_split(
    ds: &LabeledDataset,
    indices: &[usize],
    windowing: &Windowing,
    enc: &EncoderConfig,
) -> CliResult<(Vec<SpikeVector>, Vec<i64>)> {
    let mut windows = Vec::new();
    let mut labels = Vec::new();
    for &i in indices {
        for w in encode_windows(&ds.series[i], windowing, enc)? {
            windows.push(w);
            labels.push(ds.labels[i]);
        }
    }
    Ok((windows, labels))
}

/// Calibrated gate count for the whole network (every column, every layer).
pub fn network_gates(net: &Network) -> u64 {
    net.layers
        .iter()
        .flatten()
        .map(|s| estimate_gates(s.config.p, s.config.q))
        .sum()
}

struct StageLog {
    stages: Vec<StageStatus>,
    artifacts: Vec<String>,
}

impl StageLog {
    fn ok(&mut self, name: &str) {
        self.stages.push(StageStatus {
            name: name.into(),
            status: "ok".into(),
            detail: None,
        });
    }

    fn skipped(&mut self, name: &str, why: &str) {
        self.stages.push(StageStatus {
            name: name.into(),
            status: "skipped".into(),
            detail: Some(why.into()),
        });
    }

    fn failed(&mut self, name: &str, err: &CliError) {
        self.stages.push(StageStatus {
            name: name.into(),
            status: "failed".into(),
            detail: Some(err.to_string()),
        });
    }
}

/// Execute the full pipeline, writing artifacts under `out_dir`.
///
/// Any stage failure aborts the run with a stage-tagged error; the manifest
/// is still written so partial artifacts are flagged.
pub fn run_pipeline(
    cfg: &Resolved,
    config_bytes: &[u8],
    out_dir: &Path,
    opts: &PipelineOptions,
) -> CliResult<PipelineOutcome> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::stage("setup", format!("{}: {e}", out_dir.display())))?;
    let mut log = StageLog {
        stages: Vec::new(),
        artifacts: Vec::new(),
    };
    let result = run_stages(cfg, out_dir, opts, &mut log);
    let equivalence = match &result {
        Ok(outcome) => outcome.equivalence.clone(),
        Err(_) => None,
    };
    let manifest = Manifest {
        config_sha256: hex_sha256(config_bytes),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        stages: log.stages,
        artifacts: log.artifacts,
        equivalence,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    result
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn run_stages(
    cfg: &Resolved,
    out_dir: &Path,
    opts: &PipelineOptions,
    log: &mut StageLog,
) -> CliResult<PipelineOutcome> {
    macro_rules! stage {
        ($name:literal, $body:expr) => {
            match $body {
                Ok(v) => {
                    log.ok($name);
                    v
                }
                Err(e) => {
                    let err: CliError = e;
                    log.failed($name, &err);
                    return Err(err);
                }
            }
        };
    }

    let ds = stage!("load", load_dataset(&cfg.dataset.path, cfg.dataset.format, cfg.dataset.has_header));
    eprintln!(
        "loaded {} samples, {} classes, width {}",
        ds.len(),
        ds.classes().len(),
        ds.width
    );
    let (train_idx, test_idx) = {
        let split = stratified_split(&ds.labels, cfg.seed);
        log.ok("split");
        split
    };
    if train_idx.is_empty() {
        let err = CliError::Data("training split is empty".into());
        log.failed("split", &err);
        return Err(err);
    }

    let (train_windows, train_labels) = stage!(
        "encode",
        encode_split(&ds, &train_idx, &cfg.windowing, &cfg.encoder)
    );

    let mut net = stage!(
        "init",
        Network::new(cfg.spec.clone(), cfg.init, &cfg.params)
            .map_err(|e| CliError::stage("init", e))
    );

    let train_log = stage!(
        "train",
        train(&mut net, &train_windows, &cfg.params, cfg.epochs)
            .map_err(|e| CliError::stage("train", e))
    );
    write_json(&out_dir.join("train_log.json"), &train_log)?;
    log.artifacts.push("train_log.json".into());

    let label_map = stage!(
        "label",
        label_neurons(&net, &train_windows, &train_labels)
            .map_err(|e| CliError::stage("label", e))
    );

    let test_series: Vec<Vec<f64>> = test_idx.iter().map(|&i| ds.series[i].clone()).collect();
    let test_labels: Vec<i64> = test_idx.iter().map(|&i| ds.labels[i]).collect();
    let eval = stage!(
        "eval",
        evaluate_series(&net, &test_series, &test_labels, &label_map, &cfg.windowing, &cfg.encoder)
            .map_err(|e| CliError::stage("eval", e))
    );
    write_json(&out_dir.join("eval.json"), &eval)?;
    log.artifacts.push("eval.json".into());

    let model = ModelFile {
        encoder: cfg.encoder,
        windowing: cfg.windowing,
        network: net,
        label_map,
        tech: cfg.tech,
    };
    write_json(&out_dir.join("model.json"), &model)?;
    log.artifacts.push("model.json".into());

    let mut equivalence = None;
    if opts.skip_hw {
        log.skipped("genrtl", "--skip-hw");
        log.skipped("equivalence", "--skip-hw");
        log.skipped("ppa", "--skip-hw");
        return Ok(PipelineOutcome {
            eval,
            ppa: None,
            equivalence,
            train_log,
        });
    }

    let netlists = stage!(
        "genrtl",
        emit_layer_netlists(&model.network, out_dir, opts, log)
    );

    if netlists.is_empty() {
        log.skipped("equivalence", "no netlists within the emission cap");
    } else {
        let summary = stage!(
            "equivalence",
            spot_check(&model.network, &netlists, &ds, &test_idx, cfg)
        );
        match &summary {
            Some(s) if s.passed == s.total => log.ok("equivalence-result"),
            Some(s) => {
                let err = CliError::Stage {
                    stage: "equivalence",
                    message: format!("netlist mismatch: {} of {} samples agree", s.passed, s.total),
                };
                log.failed("equivalence-result", &err);
                return Err(err);
            }
            None => log.skipped("equivalence-result", "no test windows to check"),
        }
        equivalence = summary;
    }

    let gates = network_gates(&model.network);
    let ppa = estimate_ppa(gates, cfg.tech);
    write_json(&out_dir.join("ppa.json"), &ppa)?;
    log.artifacts.push("ppa.json".into());
    log.ok("ppa");

    Ok(PipelineOutcome {
        eval,
        ppa: Some(ppa),
        equivalence,
        train_log,
    })
}

/// Emit netlists for the final layer (or all layers), skipping columns over
/// the cap with a note instead of failing the run.
fn emit_layer_netlists(
    net: &Network,
    out_dir: &Path,
    opts: &PipelineOptions,
    log: &mut StageLog,
) -> CliResult<Vec<(usize, usize, Netlist)>> {
    let dir = out_dir.join("netlists");
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::stage("genrtl", format!("{}: {e}", dir.display())))?;
    let last = net.layers.len() - 1;
    let layer_range = if opts.emit_all_layers { 0..=last } else { last..=last };
    let mut out = Vec::new();
    for l in layer_range {
        for (c, state) in net.layers[l].iter().enumerate() {
            match emit_netlist_with_cap(state, opts.emit_cap) {
                Ok(nl) => {
                    let file = format!("layer{l}_col{c}.v");
                    std::fs::write(dir.join(&file), nl.to_text())
                        .map_err(|e| CliError::stage("genrtl", format!("{file}: {e}")))?;
                    log.artifacts.push(format!("netlists/{file}"));
                    out.push((l, c, nl));
                }
                Err(tnn_hw::HwError::EmissionCapExceeded { synapses, cap }) => {
                    log.skipped(
                        &format!("genrtl layer{l}_col{c}"),
                        &format!("{synapses} synapses exceed the cap of {cap}"),
                    );
                }
                Err(e) => return Err(CliError::stage("genrtl", e)),
            }
        }
    }
    Ok(out)
}

pub const SPOT_CHECK_SAMPLES: usize = 32;

/// Replay randomly chosen test windows through the emitted final-layer
/// netlists and compare against the behavioral simulator, post-WTA times
/// exactly.
fn spot_check(
    net: &Network,
    netlists: &[(usize, usize, Netlist)],
    ds: &LabeledDataset,
    test_idx: &[usize],
    cfg: &Resolved,
) -> CliResult<Option<EquivSummary>> {
    let mut test_windows = Vec::new();
    for &i in test_idx {
        test_windows.extend(encode_windows(&ds.series[i], &cfg.windowing, &cfg.encoder)?);
    }
    if test_windows.is_empty() {
        return Ok(None);
    }
    let last = net.layers.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5f07_c4ec);
    let mut passed = 0;
    for _ in 0..SPOT_CHECK_SAMPLES {
        let window = &test_windows[rng.gen_range(0..test_windows.len())];
        let layer_in = net
            .layer_input(last, window)
            .map_err(|e| CliError::stage("equivalence", e))?;
        let mut all_match = true;
        for (l, c, nl) in netlists {
            if *l != last {
                continue;
            }
            let slice = net.spec.layers[last].input_map[*c];
            let sub = SpikeVector(layer_in.as_slice()[slice.range()].to_vec());
            let state = &net.layers[last][*c];
            let hw = simulate_netlist(nl, &sub, state.config.horizon)
                .map_err(|e| CliError::stage("equivalence", e))?;
            let sw = column_forward(&sub, state).map_err(|e| CliError::stage("equivalence", e))?;
            if hw != sw.post_wta_times {
                all_match = false;
            }
        }
        if all_match {
            passed += 1;
        }
    }
    Ok(Some(EquivSummary {
        passed,
        total: SPOT_CHECK_SAMPLES,
    }))
}

/// Standalone evaluation of a saved model against a dataset file.
pub fn eval_model(model: &ModelFile, ds: &LabeledDataset) -> CliResult<EvalReport> {
    evaluate_series(
        &model.network,
        &ds.series,
        &ds.labels,
        &model.label_map,
        &model.windowing,
        &model.encoder,
    )
    .map_err(|e| CliError::stage("eval", e))
}

pub fn load_model(path: &Path) -> CliResult<ModelFile> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
