//! Seeded simulation sweeps over synthetic ontology domains.
//!
//! Each sweep is a pure function of [`SimConfig`]: replicate `r` draws from
//! ChaCha8 streams seeded with `rng_seed + r`, one stream per purpose.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crowdval_core::coherence::NetworkError;
use crowdval_core::diff::IncompatibleAlignments;
use crowdval_core::revision::LogError;
use crowdval_core::seeds::SeedError;
use crowdval_core::ModelError;

pub mod config;
pub mod discovery;
pub mod output;
pub mod population;
pub mod prefill;
pub mod stats;
pub mod synth;

pub use config::{DatasetSpec, DomainSpec, Range, SimConfig, Spread, Target};
pub use discovery::{run_correction_sweep, run_expert_knowledge_sweep, run_trust_sweep};
pub use output::{emit_csv, write_csv, CsvRow, Mechanism, PrefillRow, RowKind, SweepRow};
pub use population::{simulate_population, AnnotatorModel, PopulationProfile};
pub use prefill::run_prefill_sweep;
pub use synth::{synth_domain, SynthDataset, SynthDomain};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("infeasible domain spec: {0}")]
    InfeasibleSpec(String),
    #[error("invalid population profile: {0}")]
    InvalidProfile(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Diff(#[from] IncompatibleAlignments),
    #[error(transparent)]
    Seeds(#[from] SeedError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Log(#[from] LogError),
}

/// Stream ids within a replicate.
pub(crate) mod streams {
    pub const DOMAIN: u64 = 1;
    pub const POPULATION: u64 = 2;
    pub const VOTES: u64 = 3;
    pub const ORDER: u64 = 4;
    pub const CASCADE: u64 = 5;
}

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
