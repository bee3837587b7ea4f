//! Power-performance-area estimation calibrated to published post-synthesis
//! data points.
//!
//! The gate model attributes all gates to synapses: a 1024x16 column was
//! measured at 1.7M gates, giving 103.76 gates per synapse. Per-gate area
//! and power constants come from dividing the measured totals by that gate
//! count; the 7 nm standard-cell node is derived from the TNN7 macro node by
//! dividing out the published improvement factors (area x0.73, power x0.83,
//! delay x0.84). Latency is a per-node constant per column evaluation; the
//! 45 nm source reported no timing number, so latency there is unmodeled
//! rather than invented.

use serde::{Deserialize, Serialize};

/// Calibrated gates per synapse: 1.7e6 gates / (1024 * 16) synapses.
pub const GATES_PER_SYNAPSE: f64 = 103.76;

/// 45 nm standard cell: 1.65 mm^2 / 1.7M gates.
const AREA_45_STD_UM2: f64 = 0.9706;
/// 45 nm standard cell: 7.96 mW / 1.7M gates.
const POWER_45_STD_W: f64 = 4.682e-9;
/// 7 nm TNN7 macro cells: 0.054 mm^2 / 700,380 gates.
const AREA_7_TNN7_UM2: f64 = 0.0771;
/// 7 nm TNN7 macro cells: 39 uW / 700,380 gates.
const POWER_7_TNN7_W: f64 = 55.7e-12;
/// Measured column evaluation time at 7 nm with TNN7 macros.
const LATENCY_7_TNN7_NS: f64 = 28.14;

/// TNN7 improvement factors over 7 nm standard cells.
const TNN7_AREA_FACTOR: f64 = 0.73;
const TNN7_POWER_FACTOR: f64 = 0.83;
const TNN7_DELAY_FACTOR: f64 = 0.84;

/// A technology node plus cell-library mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TechSpec {
    #[serde(rename = "45nm-std")]
    Node45Std,
    #[serde(rename = "7nm-std")]
    Node7Std,
    #[serde(rename = "7nm-tnn7")]
    Node7Tnn7,
}

impl TechSpec {
    pub fn node_name(self) -> &'static str {
        match self {
            TechSpec::Node45Std => "45nm",
            TechSpec::Node7Std | TechSpec::Node7Tnn7 => "7nm",
        }
    }

    pub fn mode_name(self) -> &'static str {
        match self {
            TechSpec::Node45Std | TechSpec::Node7Std => "std",
            TechSpec::Node7Tnn7 => "tnn7",
        }
    }

    pub fn parse(s: &str) -> Option<TechSpec> {
        match s {
            "45nm-std" => Some(TechSpec::Node45Std),
            "7nm-std" => Some(TechSpec::Node7Std),
            "7nm-tnn7" => Some(TechSpec::Node7Tnn7),
            _ => None,
        }
    }
}

impl std::fmt::Display for TechSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.node_name(), self.mode_name())
    }
}

/// Per-gate constants for one node/mode, with calibration provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechModel {
    pub spec: TechSpec,
    /// um^2 per gate.
    pub area_per_gate_um2: f64,
    /// Watts per gate.
    pub power_per_gate_w: f64,
    /// Column evaluation latency in ns; `None` where the source data had no
    /// timing figure.
    pub column_latency_ns: Option<f64>,
    pub provenance: &'static str,
}

impl TechModel {
    pub fn for_spec(spec: TechSpec) -> TechModel {
        match spec {
            TechSpec::Node45Std => TechModel {
                spec,
                area_per_gate_um2: AREA_45_STD_UM2,
                power_per_gate_w: POWER_45_STD_W,
                column_latency_ns: None,
                provenance: "calibrated to 45 nm post-synthesis: 1.7M gates, 1.65 mm2, 7.96 mW",
            },
            TechSpec::Node7Tnn7 => TechModel {
                spec,
                area_per_gate_um2: AREA_7_TNN7_UM2,
                power_per_gate_w: POWER_7_TNN7_W,
                column_latency_ns: Some(LATENCY_7_TNN7_NS),
                provenance: "calibrated to 7 nm TNN7 macros: 700,380 gates, 0.054 mm2, 39 uW, 28.14 ns",
            },
            TechSpec::Node7Std => TechModel {
                spec,
                area_per_gate_um2: AREA_7_TNN7_UM2 / TNN7_AREA_FACTOR,
                power_per_gate_w: POWER_7_TNN7_W / TNN7_POWER_FACTOR,
                column_latency_ns: Some(LATENCY_7_TNN7_NS / TNN7_DELAY_FACTOR),
                provenance: "7 nm TNN7 constants divided by macro improvement factors \
                             (area x0.73, power x0.83, delay x0.84)",
            },
        }
    }
}

/// Gate count of a `p x q` column under the calibrated synapse-linear model.
pub fn estimate_gates(p: usize, q: usize) -> u64 {
    (GATES_PER_SYNAPSE * p as f64 * q as f64).round() as u64
}

/// PPA report. Serializes with exactly the documented field set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpaReport {
    pub gates: u64,
    pub area_mm2: f64,
    pub power_mw: f64,
    /// `null` where the node has no calibrated timing figure.
    pub latency_ns: Option<f64>,
    pub node: String,
    pub mode: String,
}

/// Estimate area, power and latency for a gate count at a node/mode.
///
/// The 7 nm standard-cell report is derived from the TNN7 report by dividing
/// each value by its improvement factor, so the factor relationship between
/// the two modes holds exactly, not approximately.
pub fn estimate_ppa(gate_count: u64, spec: TechSpec) -> PpaReport {
    let g = gate_count as f64;
    let (area_mm2, power_mw, latency_ns) = match spec {
        TechSpec::Node45Std => (g * AREA_45_STD_UM2 / 1e6, g * POWER_45_STD_W * 1e3, None),
        TechSpec::Node7Tnn7 => (
            g * AREA_7_TNN7_UM2 / 1e6,
            g * POWER_7_TNN7_W * 1e3,
            Some(LATENCY_7_TNN7_NS),
        ),
        TechSpec::Node7Std => (
            g * AREA_7_TNN7_UM2 / 1e6 / TNN7_AREA_FACTOR,
            g * POWER_7_TNN7_W * 1e3 / TNN7_POWER_FACTOR,
            Some(LATENCY_7_TNN7_NS / TNN7_DELAY_FACTOR),
        ),
    };
    PpaReport {
        gates: gate_count,
        area_mm2,
        power_mw,
        latency_ns,
        node: spec.node_name().to_string(),
        mode: spec.mode_name().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want
    }

    #[test]
    fn large_column_calibration_closure() {
        let gates = estimate_gates(1024, 16);
        assert!(rel_err(gates as f64, 1.7e6) < 0.005, "gates = {gates}");
        let r = estimate_ppa(gates, TechSpec::Node45Std);
        assert!(rel_err(r.area_mm2, 1.65) < 0.01, "area = {}", r.area_mm2);
        assert!(rel_err(r.power_mw, 7.96) < 0.01, "power = {}", r.power_mw);
        assert_eq!(r.latency_ns, None);
    }

    #[test]
    fn seven_nm_calibration_closure() {
        let gates = estimate_gates(6750, 1);
        assert_eq!(gates, 700_380);
        let r = estimate_ppa(gates, TechSpec::Node7Tnn7);
        assert!(rel_err(r.area_mm2, 0.054) < 0.02);
        assert!(rel_err(r.power_mw, 39e-3) < 0.02);
        assert_eq!(r.latency_ns, Some(28.14));
    }

    #[test]
    fn single_synapse_gate_count() {
        assert_eq!(estimate_gates(1, 1), 104);
    }

    #[test]
    fn tnn7_factors_are_exact_by_construction() {
        for gates in [1u64, 104, 700_380, 1_700_004, 123_456_789] {
            let std = estimate_ppa(gates, TechSpec::Node7Std);
            let tnn7 = estimate_ppa(gates, TechSpec::Node7Tnn7);
            assert_eq!(std.area_mm2, tnn7.area_mm2 / TNN7_AREA_FACTOR);
            assert_eq!(std.power_mw, tnn7.power_mw / TNN7_POWER_FACTOR);
            assert_eq!(
                std.latency_ns.unwrap(),
                tnn7.latency_ns.unwrap() / TNN7_DELAY_FACTOR
            );
            // 28.14 / 0.84 is exactly 33.5 in f64, so the multiplicative
            // direction is bitwise clean for latency as well.
            assert_eq!(std.latency_ns.unwrap() * TNN7_DELAY_FACTOR, 28.14);
        }
    }

    #[test]
    fn derived_std_power_example() {
        // 39 uW / 0.83 is about 47.0 uW.
        let r = estimate_ppa(700_380, TechSpec::Node7Std);
        assert!(rel_err(r.power_mw, 47.0e-3) < 0.005, "power = {}", r.power_mw);
    }

    #[test]
    fn gate_model_is_linear_in_synapses() {
        for (p, q) in [(3usize, 5usize), (10, 10), (100, 7)] {
            let one = estimate_gates(p, q);
            let two = estimate_gates(2 * p, q);
            assert!((two as i64 - 2 * one as i64).abs() <= 1);
        }
    }

    #[test]
    fn reports_follow_per_gate_constants() {
        // Report values equal gate_count x per-gate constant (unit converted)
        // up to f64 rounding of the factor division for the derived node.
        for spec in [TechSpec::Node45Std, TechSpec::Node7Std, TechSpec::Node7Tnn7] {
            let model = TechModel::for_spec(spec);
            let gates = 54_321u64;
            let r = estimate_ppa(gates, spec);
            let area = gates as f64 * model.area_per_gate_um2 / 1e6;
            let power = gates as f64 * model.power_per_gate_w * 1e3;
            assert!(rel_err(r.area_mm2, area) < 1e-12);
            assert!(rel_err(r.power_mw, power) < 1e-12);
            assert_eq!(r.latency_ns, model.column_latency_ns);
            assert!(model.area_per_gate_um2 > 0.0);
            assert!(model.power_per_gate_w > 0.0);
        }
    }

    #[test]
    fn report_json_schema() {
        let r = estimate_ppa(104, TechSpec::Node45Std);
        let json = serde_json::to_string(&r).unwrap();
        // Exactly the documented fields, in order; latency is null when the
        // node has no timing figure.
        for field in ["\"gates\":", "\"area_mm2\":", "\"power_mw\":", "\"latency_ns\":null", "\"node\":\"45nm\"", "\"mode\":\"std\""] {
            assert!(json.contains(field), "{json} missing {field}");
        }
        let order = ["gates", "area_mm2", "power_mw", "latency_ns", "node", "mode"];
        let positions: Vec<usize> = order
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }
}
