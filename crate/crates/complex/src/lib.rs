//! Simplicial complexes of sequence posets: construction, reduced homology,
//! edge-path groups and connectivity verdicts for the unimodular posets.

pub mod chain;
pub mod error;
pub mod homology;
pub mod kinds;
pub mod link_iso;
pub mod pi1;
pub mod poset;
pub mod snf;
pub mod theorem;
pub mod verdict;

pub use error::{ComplexError, Result};
pub use homology::{homology, ReducedHomology};
pub use poset::{Levels, Point, PosetKind, SequencePoset};
pub use theorem::{verify_theorem, TheoremId, TheoremReport};
pub use verdict::{connectivity_verdict, ConnectivityVerdict, Tier, VerdictConfig};
