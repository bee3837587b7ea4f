//! Gate-level netlist representation and its textual serialization.
//!
//! The primitive set is fixed to NOT, AND2, OR2, XOR2, MUX2 and DFF. Every
//! net has exactly one driver, the combinational subgraph is acyclic, and
//! every DFF is clocked by the single module clock. The text form is a
//! structural subset of standard HDL syntax (module header, wire
//! declarations, primitive instances), emitted deterministically so the
//! same column always serializes to byte-identical text.

use crate::error::HwError;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use tnn::column::NeuronModel;

pub type NetId = usize;

/// A primitive gate instance. All fields are net indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    Not { a: NetId, y: NetId },
    And2 { a: NetId, b: NetId, y: NetId },
    Or2 { a: NetId, b: NetId, y: NetId },
    Xor2 { a: NetId, b: NetId, y: NetId },
    /// y = if s { b } else { a }
    Mux2 { s: NetId, a: NetId, b: NetId, y: NetId },
    /// q follows d at each clock edge; power-on state is 0.
    Dff { d: NetId, q: NetId },
}

impl Gate {
    pub fn output(&self) -> NetId {
        match *self {
            Gate::Not { y, .. }
            | Gate::And2 { y, .. }
            | Gate::Or2 { y, .. }
            | Gate::Xor2 { y, .. }
            | Gate::Mux2 { y, .. } => y,
            Gate::Dff { q, .. } => q,
        }
    }

    pub fn inputs(&self) -> Vec<NetId> {
        match *self {
            Gate::Not { a, .. } => vec![a],
            Gate::And2 { a, b, .. } | Gate::Or2 { a, b, .. } | Gate::Xor2 { a, b, .. } => {
                vec![a, b]
            }
            Gate::Mux2 { s, a, b, .. } => vec![s, a, b],
            Gate::Dff { d, .. } => vec![d],
        }
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self, Gate::Dff { .. })
    }
}

/// Source-column snapshot carried alongside the gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetlistMeta {
    pub p: usize,
    pub q: usize,
    pub theta: u32,
    pub window: u32,
    pub horizon: u32,
    pub w_max: u32,
    pub model: NeuronModel,
    /// Integer ramp heights compiled into the counters, input-major
    /// (`ramps[i * q + j]` is synapse input `i` -> neuron `j`).
    pub ramps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub name: String,
    pub clock: NetId,
    pub reset: NetId,
    /// Input spike lines, one per column input.
    pub inputs: Vec<NetId>,
    /// Output spike lines, one per neuron.
    pub outputs: Vec<NetId>,
    /// Net names indexed by `NetId`.
    pub net_names: Vec<String>,
    pub gates: Vec<Gate>,
    pub meta: NetlistMeta,
}

impl Netlist {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn dff_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_sequential()).count()
    }

    fn net_name(&self, id: NetId) -> &str {
        &self.net_names[id]
    }

    /// Structural checks: every net except external inputs has exactly one
    /// driver, external inputs have none, and the combinational subgraph is
    /// acyclic.
    pub fn lint(&self) -> Result<(), HwError> {
        let mut drivers = vec![0usize; self.net_names.len()];
        for g in &self.gates {
            drivers[g.output()] += 1;
        }
        let mut external = vec![false; self.net_names.len()];
        external[self.clock] = true;
        external[self.reset] = true;
        for &n in &self.inputs {
            external[n] = true;
        }
        for (id, &count) in drivers.iter().enumerate() {
            let expect = usize::from(!external[id]);
            if count != expect {
                return Err(HwError::DriverConflict {
                    net: self.net_name(id).to_string(),
                    drivers: count,
                });
            }
        }
        self.comb_topo_order().map(|_| ())
    }

    /// Topological order of the combinational gates (DFF queues and external
    /// inputs are cycle cut points). Errors on a combinational loop.
    pub fn comb_topo_order(&self) -> Result<Vec<usize>, HwError> {
        // driver_gate[net] = index of the combinational gate driving it.
        let mut driver_gate = vec![usize::MAX; self.net_names.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            if !g.is_sequential() {
                driver_gate[g.output()] = gi;
            }
        }
        let comb: Vec<usize> = (0..self.gates.len())
            .filter(|&gi| !self.gates[gi].is_sequential())
            .collect();
        let mut indegree = vec![0usize; self.gates.len()];
        let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for &gi in &comb {
            for input in self.gates[gi].inputs() {
                let d = driver_gate[input];
                if d != usize::MAX {
                    indegree[gi] += 1;
                    fanout[d].push(gi);
                }
            }
        }
        let mut ready: Vec<usize> = comb.iter().copied().filter(|&g| indegree[g] == 0).collect();
        let mut order = Vec::with_capacity(comb.len());
        while let Some(g) = ready.pop() {
            order.push(g);
            for &next in &fanout[g] {
                indegree[next] -= 1;
                if indegree[next] == 0 {
                    ready.push(next);
                }
            }
        }
        if order.len() != comb.len() {
            let stuck = comb
                .iter()
                .find(|&&g| indegree[g] > 0)
                .map(|&g| self.net_name(self.gates[g].output()).to_string())
                .unwrap_or_default();
            return Err(HwError::CombinationalCycle(stuck));
        }
        Ok(order)
    }

    /// Deterministic structural text (UTF-8, LF endings). The header
    /// comments carry the column snapshot; the body is a module with
    /// one-bit ports, wire declarations and primitive instances only.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.meta;
        let model = match m.model {
            NeuronModel::RampNoLeak => "ramp-no-leak",
            NeuronModel::StepNoLeak => "step-no-leak",
        };
        let _ = writeln!(
            s,
            "// {} gate-level netlist (primitives: NOT AND2 OR2 XOR2 MUX2 DFF)",
            self.name
        );
        let _ = writeln!(
            s,
            "// p={} q={} theta={} window={} horizon={} w_max={} model={}",
            m.p, m.q, m.theta, m.window, m.horizon, m.w_max, model
        );
        for i in 0..m.p {
            let row: Vec<String> = (0..m.q).map(|j| m.ramps[i * m.q + j].to_string()).collect();
            let _ = writeln!(s, "// ramps[{}]: {}", i, row.join(" "));
        }
        let mut ports: Vec<&str> = vec![self.net_name(self.clock), self.net_name(self.reset)];
        ports.extend(self.inputs.iter().map(|&n| self.net_name(n)));
        ports.extend(self.outputs.iter().map(|&n| self.net_name(n)));
        let _ = writeln!(s, "module {} ({});", self.name, ports.join(", "));
        let _ = writeln!(s, "  input {};", self.net_name(self.clock));
        let _ = writeln!(s, "  input {};", self.net_name(self.reset));
        for &n in &self.inputs {
            let _ = writeln!(s, "  input {};", self.net_name(n));
        }
        for &n in &self.outputs {
            let _ = writeln!(s, "  output {};", self.net_name(n));
        }
        let mut is_port = vec![false; self.net_names.len()];
        for &n in [self.clock, self.reset]
            .iter()
            .chain(self.inputs.iter())
            .chain(self.outputs.iter())
        {
            is_port[n] = true;
        }
        for id in 0..self.net_names.len() {
            if !is_port[id] {
                let _ = writeln!(s, "  wire {};", self.net_name(id));
            }
        }
        for (gi, g) in self.gates.iter().enumerate() {
            let n = |id: NetId| self.net_name(id);
            let line = match *g {
                Gate::Not { a, y } => format!("NOT g{gi} (.a({}), .y({}));", n(a), n(y)),
                Gate::And2 { a, b, y } => {
                    format!("AND2 g{gi} (.a({}), .b({}), .y({}));", n(a), n(b), n(y))
                }
                Gate::Or2 { a, b, y } => {
                    format!("OR2 g{gi} (.a({}), .b({}), .y({}));", n(a), n(b), n(y))
                }
                Gate::Xor2 { a, b, y } => {
                    format!("XOR2 g{gi} (.a({}), .b({}), .y({}));", n(a), n(b), n(y))
                }
                Gate::Mux2 { s: sel, a, b, y } => format!(
                    "MUX2 g{gi} (.s({}), .a({}), .b({}), .y({}));",
                    n(sel),
                    n(a),
                    n(b),
                    n(y)
                ),
                Gate::Dff { d, q } => format!(
                    "DFF g{gi} (.clk({}), .d({}), .q({}));",
                    self.net_name(self.clock),
                    n(d),
                    n(q)
                ),
            };
            let _ = writeln!(s, "  {line}");
        }
        let _ = writeln!(s, "endmodule");
        s
    }
}
