//! Popular (Condorcet-winning) sets of matchings and arborescences.

pub mod arborescence;
pub mod bipartite;
pub mod certificates;
pub mod cli;
pub mod error;
pub mod generators;
pub mod instance;
pub mod matroid;
pub mod popularity;
pub mod prefs;
pub mod solvers;

pub use error::{Error, Result};
pub use instance::{AlternativeKind, KMatching, Matching, MatchingInstance, MatchingSet};
pub use prefs::{Comparison, PreferenceClass, PreferenceRelation};
