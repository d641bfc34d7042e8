//! Stochastic Bernoulli bandits whose arms come in clusters of known width.
//!
//! * [`kl`]: Bernoulli divergences and the KL-UCB / Clus-UCB index inversions.
//! * [`instance`]: clustered instances, width validation, gaps.
//! * [`policy`]: KL-UCB, Clus-UCB and the two-level policy behind one driver.
//! * [`bounds`]: Lai-Robbins, clustered lower and upper regret constants, and
//!   an exact LP oracle for the per-cluster program.
//! * [`sim`]: seeded episodes, parallel Monte Carlo batches, pull-count checks.
//! * [`experiment`]: JSON experiment configs, CSV/JSON outputs, SVG plots; the
//!   `clus-ucb` binary is a thin wrapper around it.
//!
//! ```
//! use clus_ucb::instance::ClusteredInstance;
//! use clus_ucb::bounds::clus_lower_bound;
//!
//! let inst = ClusteredInstance::from_parts([
//!     (0.02, vec![0.40, 0.41, 0.42]),
//!     (0.02, vec![0.60, 0.61, 0.62]),
//! ])?;
//! let report = clus_lower_bound(&inst, &inst.widths())?;
//! assert!(report.lower < report.classical);
//! # Ok::<(), clus_ucb::Error>(())
//! ```

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod kl;
pub mod policy;
pub mod sim;

pub use error::{Error, Result};
pub use instance::{ArmId, Cluster, ClusteredInstance, ValidationMode};
pub use policy::{Policy, PolicyKind, PolicyParams, TlpVariant};
pub use sim::{MonteCarloSummary, PolicySpec, RecordingGrid, RegretTrace};
