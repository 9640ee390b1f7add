//! Explicit Bergman-bundle machinery on the complex unit ball.
//!
//! The crate is organised bottom-up:
//!
//! * [`multiindex`]: multi-index enumeration in graded lexicographic order,
//!   exact ball moments, the sup norms `s_mu` and the multi-index splitting
//!   used by the curvature estimates.
//! * [`hardy`]: the truncated Hardy space `H^2(B_n)` with its orthonormal
//!   monomial frame, the Bergman kernel, rho-weighted norms and the
//!   ladder/multiplication operator calculus.
//! * [`model_curvature`]: Chern connection and curvature of the Bergman bundle
//!   over flat `C^n`, with an independent brute-force operator route.
//! * [`gram_oracle`]: first-principles Gram matrices of monomial sections,
//!   finite-rank subbundle curvature and the Gauss-Codazzi cross-check.
//! * [`perturbation`]: correction terms at the osculation point for a
//!   user-supplied metric jet.
//!
//! Axes are 0-based throughout the Rust API. JSON jet files use 1-based axes.

pub mod error;
pub mod gram_oracle;
pub mod hardy;
pub mod model_curvature;
pub mod multiindex;
pub mod perturbation;
pub mod poly;
pub mod random;

pub use error::{Error, Result};
pub use multiindex::{ExactScalar, MultiIndex};
