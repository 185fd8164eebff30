//! Resolution and linear optimization over systems of fuzzy relational
//! equations built on the max-Aczel-Alsina composition.
//!
//! ```text
//! min  c.x
//! s.t. max_j T(a_ij, x_j) = b_i   for every equation i
//!      x in [0, 1]^n
//! ```
//!
//! [`resolution`] describes the feasible set through its maximum point and
//! the candidate minimal points, and [`optimizer`] combines the two into an
//! optimum. Finding all minimal points is exponential in the worst case;
//! the enumeration merges equivalent prefixes and can prune against the
//! maximum point and an objective bound, but it does not avoid that.

pub mod error;
pub mod goldens;
pub mod instance;
pub mod io;
pub mod optimizer;
pub mod oracle;
pub mod resolution;
pub mod tnorm;

pub use error::{FreError, Result};
pub use instance::{Instance, Point, Selection, DEFAULT_TOL};
pub use optimizer::{solve, OptimizationReport, SolveOptions};
pub use resolution::{feasible_candidates, ResolutionReport, ResolveOptions};
pub use tnorm::{max_compose, tnorm_eval, tnorm_residual, TNormParam, UnitValue};
