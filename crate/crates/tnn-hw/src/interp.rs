//! In-process netlist interpretation.
//!
//! Two-phase evaluation per cycle: combinational settle in topological
//! order, then a single DFF update. Input line `i` pulses high exactly at
//! cycle `x_i`; the result per output line is the first cycle it goes high.
//! All DFFs power on at 0 and the reset port is held low, which is the
//! state the emitter's reset logic would produce anyway.

use crate::error::HwError;
use crate::netlist::{Gate, Netlist};
use tnn::spike::{SpikeTime, SpikeVector};

/// Run `netlist` for `cycles` cycles against one input spike vector and
/// return each output line's first-high cycle (absent if it never rises).
///
/// `cycles` must cover the source column's horizon; running longer never
/// changes the result because firing is gated to the horizon in hardware.
pub fn simulate_netlist(
    netlist: &Netlist,
    inputs: &SpikeVector,
    cycles: u32,
) -> Result<Vec<SpikeTime>, HwError> {
    if inputs.len() != netlist.inputs.len() {
        return Err(HwError::InputWidthMismatch {
            expected: netlist.inputs.len(),
            got: inputs.len(),
        });
    }
    if cycles < netlist.meta.horizon {
        return Err(HwError::TooFewCycles {
            cycles,
            horizon: netlist.meta.horizon,
        });
    }
    for t in inputs.iter() {
        if let Some(tick) = t.tick() {
            if tick >= netlist.meta.window {
                return Err(HwError::SpikeOutsideWindow {
                    time: tick,
                    window: netlist.meta.window,
                });
            }
        }
    }
    let order = netlist.comb_topo_order()?;

    let n_nets = netlist.net_names.len();
    let mut value = vec![false; n_nets];
    let dffs: Vec<(usize, usize)> = netlist
        .gates
        .iter()
        .filter_map(|g| match *g {
            Gate::Dff { d, q } => Some((d, q)),
            _ => None,
        })
        .collect();
    let mut state = vec![false; dffs.len()];

    let mut first_high: Vec<Option<u32>> = vec![None; netlist.outputs.len()];
    for cycle in 0..cycles {
        value[netlist.clock] = false;
        value[netlist.reset] = false;
        for (line, t) in netlist.inputs.iter().zip(inputs.iter()) {
            value[*line] = t.tick() == Some(cycle);
        }
        for (&(_, q), &s) in dffs.iter().zip(&state) {
            value[q] = s;
        }
        for &gi in &order {
            match netlist.gates[gi] {
                Gate::Not { a, y } => value[y] = !value[a],
                Gate::And2 { a, b, y } => value[y] = value[a] && value[b],
                Gate::Or2 { a, b, y } => value[y] = value[a] || value[b],
                Gate::Xor2 { a, b, y } => value[y] = value[a] ^ value[b],
                Gate::Mux2 { s, a, b, y } => value[y] = if value[s] { value[b] } else { value[a] },
                Gate::Dff { .. } => unreachable!("sequential gate in combinational order"),
            }
        }
        for (out, &line) in first_high.iter_mut().zip(&netlist.outputs) {
            if out.is_none() && value[line] {
                *out = Some(cycle);
            }
        }
        for (i, &(d, _)) in dffs.iter().enumerate() {
            state[i] = value[d];
        }
    }
    Ok(first_high.into_iter().map(SpikeTime::from).collect())
}
