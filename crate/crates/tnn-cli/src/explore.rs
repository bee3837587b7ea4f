//! Design-space exploration: sweep column knobs over a cartesian grid, run
//! the training/evaluation pipeline per candidate (hardware estimation only,
//! no netlist emission) and report the accuracy-vs-power Pareto front.

use crate::config::{Resolved, RunConfigFile};
use crate::dataset::{stratified_split, LabeledDataset};
use crate::errors::{CliError, CliResult};
use crate::pipeline::{encode_split, network_gates};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use tnn::network::{label_neurons, train, Network};
use tnn::timeseries::evaluate_series;
use tnn_hw::estimate_ppa;

pub const DEFAULT_SWEEP_CAP: usize = 256;

/// Candidate value lists for the sweepable scalars. Missing fields keep the
/// base configuration's value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub p: Option<Vec<usize>>,
    #[serde(default)]
    pub q: Option<Vec<usize>>,
    #[serde(default)]
    pub theta: Option<Vec<u32>>,
    #[serde(default)]
    pub window: Option<Vec<u32>>,
    #[serde(default)]
    pub mu_capture: Option<Vec<f64>>,
    #[serde(default)]
    pub mu_backoff: Option<Vec<f64>>,
    #[serde(default)]
    pub mu_search: Option<Vec<f64>>,
    /// Cartesian product cap; exceeding it is a configuration error.
    #[serde(default = "default_cap")]
    pub max_candidates: usize,
}

fn default_cap() -> usize {
    DEFAULT_SWEEP_CAP
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateParams {
    pub p: usize,
    pub q: usize,
    pub theta: u32,
    pub window: u32,
    pub mu_capture: f64,
    pub mu_backoff: f64,
    pub mu_search: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateRow {
    #[serde(flatten)]
    pub params: CandidateParams,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_mw: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoReport {
    pub objective: Objective,
    pub candidates: Vec<CandidateRow>,
    /// Indices into `candidates` of the non-dominated set, ascending.
    pub front: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Objective {
    pub maximize: String,
    pub minimize: String,
}

/// Cartesian product of the sweep lists over the base configuration, in a
/// fixed field order so candidate indices are stable.
pub fn enumerate_candidates(
    base: &RunConfigFile,
    sweep: &SweepSpec,
) -> CliResult<Vec<CandidateParams>> {
    if base.network.layers.len() != 1 || base.network.layers[0].columns.len() != 1 {
        return Err(CliError::Config(
            "explore sweeps a single-layer, single-column base configuration".into(),
        ));
    }
    let col = base.network.layers[0].columns[0];
    let channels = base.encoder.channels();
    let base_p = col.p.unwrap_or(base.network.input_width / channels);
    let base_window = col.window.unwrap_or(base.encoder.window);
    let ps = sweep.p.clone().unwrap_or_else(|| vec![base_p]);
    let qs = sweep.q.clone().unwrap_or_else(|| vec![col.q]);
    let thetas = sweep.theta.clone().unwrap_or_else(|| vec![col.theta]);
    let windows = sweep.window.clone().unwrap_or_else(|| vec![base_window]);
    let caps = sweep
        .mu_capture
        .clone()
        .unwrap_or_else(|| vec![base.learning.mu_capture]);
    let backs = sweep
        .mu_backoff
        .clone()
        .unwrap_or_else(|| vec![base.learning.mu_backoff]);
    let searches = sweep
        .mu_search
        .clone()
        .unwrap_or_else(|| vec![base.learning.mu_search]);

    let total = ps.len() * qs.len() * thetas.len() * windows.len() * caps.len() * backs.len()
        * searches.len();
    if total == 0 {
        return Err(CliError::Config("sweep lists must be nonempty".into()));
    }
    if total > sweep.max_candidates {
        return Err(CliError::Config(format!(
            "sweep has {total} candidates, above the cap of {}",
            sweep.max_candidates
        )));
    }
    let mut out = Vec::with_capacity(total);
    for &p in &ps {
        for &q in &qs {
            for &theta in &thetas {
                for &window in &windows {
                    for &mu_capture in &caps {
                        for &mu_backoff in &backs {
                            for &mu_search in &searches {
                                out.push(CandidateParams {
                                    p,
                                    q,
                                    theta,
                                    window,
                                    mu_capture,
                                    mu_backoff,
                                    mu_search,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Instantiate the base configuration at one grid point.
pub fn apply_candidate(base: &RunConfigFile, c: &CandidateParams) -> RunConfigFile {
    let mut file = base.clone();
    let channels = file.encoder.channels();
    file.encoder.window = c.window;
    file.network.input_width = c.p * channels;
    let col = &mut file.network.layers[0].columns[0];
    col.p = Some(c.p);
    col.q = c.q;
    col.theta = c.theta;
    col.window = Some(c.window);
    col.horizon = None;
    file.network.layers[0].input_map = None;
    if let Some(w) = &mut file.windowing {
        w.length = Some(c.p);
        // A stride wider than the new window would skip data; keep explicit
        // strides only when they still fit.
        if let Some(s) = w.stride {
            if s > c.p {
                w.stride = Some(c.p);
            }
        }
    }
    file.learning.mu_capture = c.mu_capture;
    file.learning.mu_backoff = c.mu_backoff;
    file.learning.mu_search = c.mu_search;
    file
}

/// Train and evaluate one candidate in memory; no artifacts are written and
/// no netlists are emitted.
fn run_candidate(cfg: &Resolved, ds: &LabeledDataset) -> CliResult<(u64, f64, f64)> {
    let (train_idx, test_idx) = stratified_split(&ds.labels, cfg.seed);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(CliError::Data(
            "dataset too small for an 80/20 split".into(),
        ));
    }
    let (train_windows, train_labels) = encode_split(ds, &train_idx, &cfg.windowing, &cfg.encoder)?;
    let mut net = Network::new(cfg.spec.clone(), cfg.init, &cfg.params)
        .map_err(|e| CliError::stage("init", e))?;
    train(&mut net, &train_windows, &cfg.params, cfg.epochs)
        .map_err(|e| CliError::stage("train", e))?;
    let label_map = label_neurons(&net, &train_windows, &train_labels)
        .map_err(|e| CliError::stage("label", e))?;
    let test_series: Vec<Vec<f64>> = test_idx.iter().map(|&i| ds.series[i].clone()).collect();
    let test_labels: Vec<i64> = test_idx.iter().map(|&i| ds.labels[i]).collect();
    let report = evaluate_series(
        &net,
        &test_series,
        &test_labels,
        &label_map,
        &cfg.windowing,
        &cfg.encoder,
    )
    .map_err(|e| CliError::stage("eval", e))?;
    let gates = network_gates(&net);
    let power = estimate_ppa(gates, cfg.tech).power_mw;
    Ok((gates, report.accuracy, power))
}

fn worker_count(candidates: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var("TNN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(candidates).max(1)
}

/// Run the whole sweep. Candidates run in a worker pool (capped by the
/// TNN_THREADS environment variable); each candidate is deterministic, so
/// the report does not depend on scheduling.
pub fn explore(
    base: &RunConfigFile,
    sweep: &SweepSpec,
    ds: &LabeledDataset,
    seed_override: Option<u64>,
) -> CliResult<ParetoReport> {
    let candidates = enumerate_candidates(base, sweep)?;
    let rows: Mutex<Vec<Option<CandidateRow>>> = Mutex::new(vec![None; candidates.len()]);
    let next = AtomicUsize::new(0);
    let workers = worker_count(candidates.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= candidates.len() {
                    break;
                }
                let c = candidates[i];
                let row = match apply_candidate(base, &c)
                    .resolve(seed_override)
                    .and_then(|cfg| run_candidate(&cfg, ds))
                {
                    Ok((gates, accuracy, power_mw)) => CandidateRow {
                        params: c,
                        status: "ok".into(),
                        error: None,
                        gates: Some(gates),
                        accuracy: Some(accuracy),
                        power_mw: Some(power_mw),
                    },
                    Err(e) => CandidateRow {
                        params: c,
                        status: "error".into(),
                        error: Some(e.to_string()),
                        gates: None,
                        accuracy: None,
                        power_mw: None,
                    },
                };
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let candidates: Vec<CandidateRow> = rows
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every candidate produced a row"))
        .collect();
    let points: Vec<(usize, f64, f64)> = candidates
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match (r.accuracy, r.power_mw) {
            (Some(a), Some(p)) => Some((i, a, p)),
            _ => None,
        })
        .collect();
    let front = pareto_front(&points);
    Ok(ParetoReport {
        objective: Objective {
            maximize: "accuracy".into(),
            minimize: "power_mw".into(),
        },
        candidates,
        front,
    })
}

/// Non-dominated subset for (maximize accuracy, minimize power). Ties and
/// duplicates are kept: only strict domination removes a point.
pub fn pareto_front(points: &[(usize, f64, f64)]) -> Vec<usize> {
    let mut front = Vec::new();
    for &(i, acc_i, pow_i) in points {
        let dominated = points.iter().any(|&(j, acc_j, pow_j)| {
            j != i && acc_j >= acc_i && pow_j <= pow_i && (acc_j > acc_i || pow_j < pow_i)
        });
        if !dominated {
            front.push(i);
        }
    }
    front
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<(usize, f64, f64)> {
        raw.iter().enumerate().map(|(i, &(a, p))| (i, a, p)).collect()
    }

    #[test]
    fn dominated_point_is_dropped() {
        // (0.85, 6.0) is dominated by (0.9, 5.0).
        let front = pareto_front(&pts(&[(0.9, 5.0), (0.8, 1.0), (0.85, 6.0)]));
        assert_eq!(front, vec![0, 1]);
    }

    #[test]
    fn single_point_is_its_own_front() {
        assert_eq!(pareto_front(&pts(&[(0.5, 2.0)])), vec![0]);
    }

    #[test]
    fn duplicates_are_both_kept() {
        let front = pareto_front(&pts(&[(0.9, 5.0), (0.9, 5.0)]));
        assert_eq!(front, vec![0, 1]);
    }

    #[test]
    fn brute_force_agreement_on_a_grid() {
        // Every front point is non-dominated and every non-front point is
        // dominated, by definition; check on a mixed grid.
        let raw: Vec<(f64, f64)> = (0..25)
            .map(|i| ((i % 5) as f64 / 5.0, (i / 5) as f64 + 1.0))
            .collect();
        let points = pts(&raw);
        let front = pareto_front(&points);
        for &(i, a_i, p_i) in &points {
            let dominated = points.iter().any(|&(j, a_j, p_j)| {
                j != i && a_j >= a_i && p_j <= p_i && (a_j > a_i || p_j < p_i)
            });
            assert_eq!(!dominated, front.contains(&i));
        }
    }
}
