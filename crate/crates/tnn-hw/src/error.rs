use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HwError {
    #[error("column of {synapses} synapses exceeds the emission cap of {cap}")]
    EmissionCapExceeded { synapses: usize, cap: usize },

    #[error("net {net} has {drivers} drivers (exactly one required)")]
    DriverConflict { net: String, drivers: usize },

    #[error("combinational cycle detected through net {0}")]
    CombinationalCycle(String),

    #[error("input width mismatch: netlist has {expected} input lines, got {got}")]
    InputWidthMismatch { expected: usize, got: usize },

    #[error("{cycles} cycles are too few: netlist horizon is {horizon}")]
    TooFewCycles { cycles: u32, horizon: u32 },

    #[error("input spike at cycle {time} is outside the window of {window} ticks")]
    SpikeOutsideWindow { time: u32, window: u32 },

    #[error(transparent)]
    Column(#[from] tnn::Error),
}
