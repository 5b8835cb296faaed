//! Translation-invariant splitting Gibbs measures of the three-state
//! hard-core SOS model with the *wand* admissibility graph on Cayley trees.
//!
//! The crate enumerates the fixed points of the boundary-law equation,
//! builds the tree-indexed Markov chain of each measure and classifies its
//! extremality with the Kesten–Stigum and MSW criteria.
//!
//! ```
//! use hcsos::{extremality, tisgm};
//!
//! let set = tisgm::enumerate(2, 0.5).unwrap();
//! assert_eq!(set.len(), 3);
//!
//! let v = extremality::classify_mu0(2, 1.0, extremality::DEFAULT_BOUNDARY_TOL).unwrap();
//! assert_eq!(v.verdict, extremality::Verdict::Extreme);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; the `hcsos` binary exposes
//! the same operations on the command line.

pub mod chain;
pub mod cli;
pub mod error;
pub mod extremality;
pub mod model;
pub mod phase;
pub mod rootfind;
pub mod sampler;
pub mod tisgm;

pub use error::{Error, Result};
pub use model::{Activity, Branch, Measure, ModelParams, TisgmSolution, WandAdmissibility};
