//! Mining collective-identity mentions in annotated historical newspaper corpora.
//!
//! The pipeline runs corpus ingestion ([`corpus`]), lexicon induction ([`lexicon`]),
//! mention extraction with tagged context windows ([`mentions`]), stratified evaluation
//! sampling ([`sampler`]), LLM-driven targeted sentiment ([`sentiment`]), scoring
//! ([`evaluation`]), identity-level aggregation ([`aggregation`]) and the typed
//! co-occurrence graph ([`graph`]).

pub mod aggregation;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod lexicon;
pub mod mentions;
pub mod rng;
pub mod sampler;
pub mod sentiment;

pub use error::{Error, Result};
