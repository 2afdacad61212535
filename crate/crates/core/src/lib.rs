#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Weighted greedy approximation in finite-dimensional sequence spaces.
//!
//! The crate evaluates the thresholding greedy algorithm, Chebyshev
//! refinement and exhaustive weighted m-term oracles on small spaces, computes
//! democracy-type constants by enumeration and checks the resulting
//! inequalities on structured and random instance families.

pub mod chebyshev;
pub mod config;
pub mod constants;
pub mod error;
pub mod greedy;
pub mod lp;
pub mod report;
pub mod sampling;
pub mod setfn;
pub mod sigma;
pub mod space;
pub mod subsets;
pub mod suite;
pub mod weight;

pub use chebyshev::{chebyshev_refine, ChebyshevResult};
pub use config::{load_config, parse_config, OutputFormat, RunConfig};
pub use constants::{ConstantEstimate, ConstantName, FundamentalFunctionTable};
pub use error::{Error, Result};
pub use greedy::{greedy_ordering, greedy_sum, truncate, GreedyOrdering, GreedyRun, TiePolicy};
pub use report::{emit, render, run, Report};
pub use sampling::{Instance, SamplePlan};
pub use setfn::{Rational, SetFunction};
pub use sigma::{sigma_w, SigmaMode, SigmaResult};
pub use space::{BasisConstantEstimate, CoefficientVector, NormedSpace, SpaceKind};
pub use suite::{InequalityCheck, Verdict};
pub use weight::{w_measure, IndexSet, TailRule, Weight};

/// Tool version stamped into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
