//! Reference computations for testing `mixep`, written independently of
//! the library: numerical quadrature instead of closed-form normalizers, a
//! textbook Gaussian mixture-regression EM on `nalgebra`, a Newton solve of
//! the mixing-weight KKT system, the Hungarian assignment algorithm and
//! vertex enumeration for weighted least absolute deviations.

pub mod gaussian_em;
pub mod hungarian;
pub mod lad;
pub mod pi_kkt;
pub mod quad;

pub use quad::{ep_cdf_sorted, ep_log_likelihood_by_quadrature, ep_normalizer_by_quadrature, ks_statistic};
