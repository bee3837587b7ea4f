//! `tnn` — train TNN columns, compile them to gate-level netlists and
//! estimate hardware cost.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 pipeline
//! stage error.

mod config;
mod dataset;
mod errors;
mod explore;
mod pipeline;
mod synth;

use clap::{Parser, Subcommand};
use errors::{CliError, CliResult};
use std::path::PathBuf;
use tnn_hw::{emit_netlist_with_cap, estimate_gates, estimate_ppa, TechSpec, DEFAULT_EMIT_CAP};

#[derive(Parser)]
#[command(
    name = "tnn",
    version,
    about = "Temporal neural network columns: training, netlist generation and PPA estimation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline: train, label, evaluate, emit netlists,
    /// spot-check equivalence and estimate PPA.
    Train {
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the configuration's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for artifacts.
        #[arg(long)]
        out: PathBuf,
        /// Skip netlist emission, equivalence checking and PPA.
        #[arg(long)]
        skip_hw: bool,
        /// Emit netlists for every layer, not just the final one.
        #[arg(long)]
        emit_all_layers: bool,
    },
    /// Evaluate a trained model against a labeled dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Dataset format: csv-labeled or ucr-tsv.
        #[arg(long, default_value = "csv-labeled")]
        format: String,
        #[arg(long)]
        has_header: bool,
        /// Where to write eval.json (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit gate-level netlists from a trained model.
    Genrtl {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Synapse cap per emitted column.
        #[arg(long, default_value_t = DEFAULT_EMIT_CAP)]
        cap: usize,
        /// Emit every layer, not just the final one.
        #[arg(long)]
        all_layers: bool,
    },
    /// Estimate gate count, area, power and latency for a column size.
    Ppa {
        /// Input line count.
        #[arg(long, conflicts_with = "model")]
        p: Option<usize>,
        /// Neuron count.
        #[arg(long, conflicts_with = "model")]
        q: Option<usize>,
        /// Use a trained model's total network size instead of --p/--q.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Technology node: 45nm-std, 7nm-std or 7nm-tnn7.
        #[arg(long)]
        node: String,
        /// Where to write ppa.json (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep column parameters and report the accuracy/power Pareto front.
    Explore {
        /// Base run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Sweep specification (JSON lists per parameter).
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write pareto.json (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic labeled dataset (csv-labeled format).
    Datagen {
        /// Generator: orthogonal-patterns or sine-vs-square.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 4)]
        classes: usize,
        #[arg(long)]
        n_per_class: usize,
        /// Series length in values.
        #[arg(long)]
        length: usize,
        /// Noise amplitude in value units (inputs span 0..255).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("tnn: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn emit_or_print<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::stage("write", format!("{}: {e}", parent.display())))?;
                }
            }
            pipeline::write_json(path, value)
        }
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::stage("write", e))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Train {
            config,
            seed,
            out,
            skip_hw,
            emit_all_layers,
        } => {
            let (file, bytes) = config::load_config(&config)?;
            let resolved = file.resolve(seed)?;
            let opts = pipeline::PipelineOptions {
                skip_hw,
                emit_all_layers,
                ..Default::default()
            };
            let outcome = pipeline::run_pipeline(&resolved, &bytes, &out, &opts)?;
            println!(
                "accuracy {:.4}  purity {:.4}  samples {}",
                outcome.eval.accuracy, outcome.eval.purity, outcome.eval.samples
            );
            if let Some(last) = outcome.train_log.last() {
                println!(
                    "final epoch weight change (L1): {:.4}",
                    last.weight_delta_l1
                );
            }
            if let Some(ppa) = &outcome.ppa {
                println!(
                    "gates {}  area {:.6} mm2  power {:.6} mW",
                    ppa.gates, ppa.area_mm2, ppa.power_mw
                );
            }
            if let Some(eq) = &outcome.equivalence {
                println!("netlist equivalence spot-check: {}/{}", eq.passed, eq.total);
            }
            Ok(())
        }
        Cmd::Eval {
            model,
            data,
            format,
            has_header,
            out,
        } => {
            let model = pipeline::load_model(&model)?;
            let format = dataset::DataFormat::parse(&format)
                .ok_or_else(|| CliError::Config(format!("unknown dataset format '{format}'")))?;
            let ds = dataset::load_dataset(&data, format, has_header)?;
            let report = pipeline::eval_model(&model, &ds)?;
            emit_or_print(&report, out.as_ref())
        }
        Cmd::Genrtl {
            model,
            out,
            cap,
            all_layers,
        } => {
            let model = pipeline::load_model(&model)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::stage("genrtl", format!("{}: {e}", out.display())))?;
            let net = &model.network;
            let last = net.layers.len() - 1;
            let layers = if all_layers { 0..=last } else { last..=last };
            let mut emitted = 0usize;
            for l in layers {
                for (c, state) in net.layers[l].iter().enumerate() {
                    let nl = emit_netlist_with_cap(state, cap)
                        .map_err(|e| CliError::stage("genrtl", e))?;
                    let file = out.join(format!("layer{l}_col{c}.v"));
                    std::fs::write(&file, nl.to_text())
                        .map_err(|e| CliError::stage("genrtl", format!("{}: {e}", file.display())))?;
                    println!("{}", file.display());
                    emitted += 1;
                }
            }
            if emitted == 0 {
                return Err(CliError::Config("model has no columns to emit".into()));
            }
            Ok(())
        }
        Cmd::Ppa {
            p,
            q,
            model,
            node,
            out,
        } => {
            let spec = TechSpec::parse(&node)
                .ok_or_else(|| CliError::Config(format!("unknown tech node '{node}'")))?;
            let gates = match (p, q, model) {
                (Some(p), Some(q), None) => {
                    if p == 0 || q == 0 {
                        return Err(CliError::Config("p and q must be >= 1".into()));
                    }
                    estimate_gates(p, q)
                }
                (None, None, Some(path)) => {
                    let model = pipeline::load_model(&path)?;
                    pipeline::network_gates(&model.network)
                }
                _ => {
                    return Err(CliError::Config(
                        "provide either --p and --q, or --model".into(),
                    ))
                }
            };
            let report = estimate_ppa(gates, spec);
            emit_or_print(&report, out.as_ref())
        }
        Cmd::Explore {
            config,
            sweep,
            seed,
            out,
        } => {
            let (base, _) = config::load_config(&config)?;
            let sweep_bytes = std::fs::read(&sweep)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", sweep.display())))?;
            let sweep: explore::SweepSpec = serde_json::from_slice(&sweep_bytes)
                .map_err(|e| CliError::Config(format!("sweep: {e}")))?;
            // Validate the base configuration and load the dataset once.
            let resolved = base.resolve(seed)?;
            let ds = dataset::load_dataset(
                &resolved.dataset.path,
                resolved.dataset.format,
                resolved.dataset.has_header,
            )?;
            let report = explore::explore(&base, &sweep, &ds, seed)?;
            let ok = report.candidates.iter().filter(|c| c.status == "ok").count();
            eprintln!(
                "explored {} candidates ({} ok), front size {}",
                report.candidates.len(),
                ok,
                report.front.len()
            );
            emit_or_print(&report, out.as_ref())
        }
        Cmd::Datagen {
            kind,
            classes,
            n_per_class,
            length,
            noise,
            seed,
            out,
        } => {
            let kind = synth::SynthKind::parse(&kind)
                .ok_or_else(|| CliError::Config(format!("unknown generator '{kind}'")))?;
            let ds = synth::gen_synthetic(kind, classes, n_per_class, length, noise, seed)?;
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
                }
            }
            std::fs::write(&out, dataset::to_csv(&ds))
                .map_err(|e| CliError::Data(format!("{}: {e}", out.display())))?;
            eprintln!("wrote {} samples to {}", ds.len(), out.display());
            Ok(())
        }
    }
}
