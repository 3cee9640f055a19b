//! Numerical laboratory for logistic-type semilinear equations
//! `Δu + a(x)u − b(x)u^σ = 0` on rotationally symmetric model manifolds.
//!
//! The crate is organized bottom-up:
//!
//! * [`manifold`]: warping functions, volumes, growth classification.
//! * [`radial`]: radial grids, fields and the finite-volume radial Laplacian.
//! * [`spectrum`]: principal eigenvalues, spectral bottoms and their limits.
//! * [`logistic`]: monotone iteration, blow-up and maximal solutions.
//! * [`subsolution`]: the annulus/ball sub-solution construction.
//! * [`nonexistence`]: integral estimates and non-existence certificates.
//! * [`green`]: radial Green kernel and Poisson solver.

pub mod coefficient;
pub mod error;
pub mod fit;
pub mod green;
pub mod logistic;
pub mod manifold;
pub mod nonexistence;
pub mod problem;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod spectrum;
pub mod subsolution;
mod tridiag;

pub use coefficient::Coefficient;
pub use error::{Error, ErrorClass, Result};
pub use manifold::{GrowthClassification, ModelManifold, WarpingFunction};
pub use problem::LogisticProblem;
pub use radial::{Grading, RadialField, RadialGrid, RadialOperator};
pub use report::{CertificateReport, Verdict};

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn fmt17_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = super::fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(super::fmt17(f64::INFINITY), "inf");
    }
}
