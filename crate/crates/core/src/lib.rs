//! Quadrature coherence scale (QCS) of states whose Wigner function is a finite
//! sum of complex Gaussians.
//!
//! Purity and the gradient overlap `∫|∇W|²` reduce to double sums of pairwise
//! Gaussian overlaps, so `C² = ∫|∇W|² / (2n ∫W²)` is computed in closed form.
//! The [`oracle`] module recomputes the same quantities by grid quadrature.
//!
//! ```
//! use qcs_core::{engine, states};
//!
//! let report = engine::qcs(&states::cat(2.0)).unwrap();
//! let exact = states::reference::qcs2_cat(2.0);
//! assert!((report.qcs_squared - exact).abs() < 1e-9 * exact);
//! ```

pub mod channels;
pub mod cli;
pub mod document;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod state;
pub mod states;

pub use channels::GaussianChannel;
pub use engine::{qcs, QcsReport};
pub use error::{Error, Result};
pub use state::{GaussianSumState, GaussianTerm, PhasePoint};
