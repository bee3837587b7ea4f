//! Hardware back-end for trained TNN columns.
//!
//! A frozen column compiles to a gate-level netlist over six primitives
//! (NOT, AND2, OR2, XOR2, MUX2, DFF) where one clock cycle is one encoding
//! tick. The in-process interpreter evaluates netlists cycle-accurately so
//! hardware behavior can be checked against the behavioral simulator
//! exactly, and the PPA model turns synapse counts into area, power and
//! latency figures calibrated to published post-synthesis data points.

pub mod emit;
pub mod error;
pub mod interp;
pub mod netlist;
pub mod ppa;

pub use emit::{emit_netlist, emit_netlist_with_cap, DEFAULT_EMIT_CAP};
pub use error::HwError;
pub use interp::simulate_netlist;
pub use netlist::{Gate, Netlist, NetlistMeta};
pub use ppa::{estimate_gates, estimate_ppa, PpaReport, TechModel, TechSpec, GATES_PER_SYNAPSE};
