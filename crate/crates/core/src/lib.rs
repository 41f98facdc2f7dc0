//! Random k-sparse partial Steiner triple systems.
//!
//! The central piece is [`process::ProcessState`], a simulator of the random
//! removal process: repeatedly pick a uniformly random available triple, add
//! it to the chosen system, and discard every available triple that would
//! complete an Erdős configuration on at most `k + 2` points together with it
//! and already chosen triples. Around it sit independent verifiers
//! ([`sparse_check`]), the configuration catalog ([`configs`]), the analytic
//! trajectories of the tracked quantities ([`trajectory`], [`stats`]),
//! extension counting ([`extensions`]) and the weakly sparse `(n,q,r)`
//! construction ([`general_designs`]).

mod canon;
pub mod configs;
pub mod embed;
pub mod error;
pub mod extensions;
pub mod formats;
pub mod general_designs;
pub mod process;
pub mod rng;
pub mod sparse_check;
pub mod stats;
pub mod trajectory;
pub mod triple;

pub use error::{Error, Result};
pub use triple::{Pair, Triple, TripleSystem};
