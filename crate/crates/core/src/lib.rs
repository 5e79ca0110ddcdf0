//! Extremality and reconstruction thresholds for the free-boundary Potts
//! model on rooted trees.
//!
//! * [`channel`]: the symmetric q-ary broadcast channel, probability and
//!   message vectors, and the scalar functions shared by the other modules.
//! * [`thresholds`]: ferromagnetic, extremality (`c̄`, `β_c`) and
//!   Kesten–Stigum thresholds.
//! * [`tree`]: regular, spherically symmetric and Galton–Watson trees.
//! * [`broadcast`]: broadcast sampling, exact belief propagation of the root
//!   law, and Monte-Carlo estimators of the boundary entropy.
//! * [`tables`]: reference tables for q = 5.
//! * [`cli`]: the `potts-tree` command-line front end.
//!
//! ```
//! use potts_tree::channel::PottsChannel;
//! use potts_tree::thresholds::{beta_c, OptimizerSettings};
//!
//! let ch = PottsChannel::new(3, 1.0).unwrap();
//! assert!((ch.lambda2() - (2f64.exp() - 1.0) / (2f64.exp() + 2.0)).abs() < 1e-15);
//!
//! let s = OptimizerSettings { random_restarts: 4, ..Default::default() };
//! let b = beta_c(2.0, 3, &s).unwrap();
//! assert!((b - 1.0434).abs() < 1e-3);
//! ```

// Range checks are written `!(x > lo)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod broadcast;
pub mod channel;
pub mod cli;
pub mod error;
mod optimize;
pub mod tables;
pub mod thresholds;
pub mod tree;

pub use broadcast::{
    bp_all_messages, bp_root_marginal, broadcast, entropy_mc, root_deviation_probe, EntropyEstimate, RootSymbol,
    SpinConfiguration, TreeSpec,
};
pub use channel::{MessageVector, PottsChannel, ProbVector};
pub use error::{Error, Result};
pub use thresholds::{OptimizerSettings, ThresholdReport};
pub use tree::{OffspringDistribution, TreeInstance};
