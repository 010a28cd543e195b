//! Exact simulation of binary-state recurrent networks with one analog unit,
//! together with the interval partition, quotient and reduction constructions
//! built on top of them.

pub mod cut;
pub mod engine;
pub mod error;
pub mod fa;
pub mod format;
pub mod network;
pub mod numerics;
pub mod partition;
pub mod protocol;
pub mod quotient;
pub mod reduction;

pub use cut::{beta_value, build_cut_acceptor, cut_member, qp_explore, CutParams, QpKind, QpVerdict};
pub use engine::Engine;
pub use error::{Error, Result};
pub use fa::{compile_mealy, run_mealy, MealyMachine};
pub use network::{excitation, step, Configuration, Network, NetworkBuilder, Violation};
pub use numerics::{rational, ratio, HalfLinePair, Interval, IntervalPartition, Rational, Side};
pub use partition::{
    build_partition_exhaustive, build_partition_refined, extrapolation_table, ExtrapolationTable, Method,
    PartitionResult, StartStates,
};
pub use quotient::{
    boolean_f, build_quotient_network, snapshot_schedule, DnfMode, QuotientMode, QuotientNetwork, QuotientSpec,
    TruthTable,
};
pub use reduction::{
    build_buffer_controller, build_reduction, pad_words, word_scheme, BufferController, Reduction, ReductionConfig,
    ReductionSpec,
};
pub use protocol::{
    accepts, accepts_from, compare_languages, enumerate_language, run_online, Alphabet, RunTrace, Word,
};
