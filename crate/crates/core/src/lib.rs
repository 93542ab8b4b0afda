//! Waiting times for a target DNA word to appear under neutral mutation: at a
//! single locus, in a sequence segment and in a population.

pub mod error;
pub mod markov;
pub mod mutation_chain;
pub mod par;
pub mod population;
pub mod rng;
pub mod sequence_sim;
pub mod stats;
pub mod word;
pub mod word_stats;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use markov::BirthDeathChain;
pub use par::Execution;
pub use population::PopulationParams;
pub use word::DnaWord;
