//! Temporal neural network (TNN) columns in software.
//!
//! A TNN computes with the *relative timing* of spikes: one spike encodes one
//! value, earlier meaning stronger. The building block is a column of `q`
//! excitatory neurons fed by `p` input lines through a `p x q` synaptic
//! crossbar. Neurons integrate ramp-no-leak (or step-no-leak) potentials,
//! lateral 1-winner-take-all inhibition suppresses all but the earliest
//! spike, and synaptic weights adapt with an STDP rule table driven only by
//! local spike timing.
//!
//! Weights are 8.8 fixed point throughout, so training is bit-reproducible
//! across platforms and maps directly onto hardware counters.

pub mod column;
pub mod encoder;
pub mod error;
pub mod network;
pub mod spike;
pub mod stdp;
pub mod timeseries;
pub mod weight;

pub use column::{
    column_forward, neuron_fire_time, wta_select, ColumnConfig, ColumnOutput, ColumnState,
    NeuronModel, WeightMatrix,
};
pub use encoder::{
    encode_image, encode_sample, encode_value, encode_window, normalize_window, EncoderConfig,
    EncoderMode, Normalization,
};
pub use error::Error;
pub use network::{
    evaluate, global_winner, label_neurons, train, train_layer, EvalReport, InputSlice, LayerSpec,
    Network, NetworkSpec, TrainRecord,
};
pub use spike::{SpikeTime, SpikeVector};
pub use stdp::{init_weights, stdp_delta, stdp_update_column, InitScheme, StdpParams};
pub use timeseries::{encode_series, evaluate_series, series_cluster, Windowing};
pub use weight::Weight;

/// Convenient result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
