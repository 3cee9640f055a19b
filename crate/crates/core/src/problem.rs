use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::manifold::ModelManifold;

/// `Δu + a(r)u − b(r)u^σ = 0` on a model manifold.
///
/// `b ≥ 0` is accepted so that the linear limit `a = b = 0` can be posed;
/// operations that need `b > 0` check it themselves.
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    manifold: ModelManifold,
    a: Coefficient,
    b: Coefficient,
    sigma: f64,
}

impl LogisticProblem {
    pub fn new(manifold: ModelManifold, a: Coefficient, b: Coefficient, sigma: f64) -> Result<Self> {
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("exponent sigma must exceed 1, got {sigma}")));
        }
        if let Coefficient::Constant(c) = b {
            if c < 0.0 {
                return Err(Error::invalid(format!("b must be non-negative, got {c}")));
            }
        }
        Ok(Self { manifold, a, b, sigma })
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn a(&self) -> &Coefficient {
        &self.a
    }

    pub fn b(&self) -> &Coefficient {
        &self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Checks `b > 0` at `count` sample points of `[0, radius]`.
    pub fn require_positive_b(&self, radius: f64) -> Result<()> {
        let (lo, _) = self.b.range_on(0.0, radius, 1001);
        if !(lo > 0.0) {
            return Err(Error::Precondition(format!(
                "b must be strictly positive on [0, {radius}] (min {lo})"
            )));
        }
        Ok(())
    }

    /// The constant `sup (a₊/b)^{1/(σ−1)}` over `[0, radius]`, which bounds every
    /// constant equilibrium.
    pub fn equilibrium_bound(&self, radius: f64) -> f64 {
        let count = 2001;
        (0..count)
            .map(|i| radius * i as f64 / (count - 1) as f64)
            .map(|r| {
                let a = self.a.eval(r).max(0.0);
                let b = self.b.eval(r);
                if a == 0.0 {
                    0.0
                } else if b > 0.0 {
                    (a / b).powf(1.0 / (self.sigma - 1.0))
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}
