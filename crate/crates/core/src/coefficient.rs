//! Radial coefficient profiles `a(r)`, `b(r)`.

use std::fmt;
use std::sync::Arc;

use crate::radial::{RadialField, RadialGrid};

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial coefficient: a constant, a closure, or tabulated samples
/// (linearly interpolated, constant beyond the table).
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Function { f: RadialFn, label: String },
    Samples { r: Vec<f64>, values: Vec<f64> },
}

impl Coefficient {
    pub fn function(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn from_field(field: &RadialField) -> Self {
        Coefficient::Samples {
            r: field.nodes().to_vec(),
            values: field.values().to_vec(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function { f, .. } => f(r),
            Coefficient::Samples { r: rs, values } => {
                if r <= rs[0] {
                    return values[0];
                }
                let last = rs.len() - 1;
                if r >= rs[last] {
                    return values[last];
                }
                let i = rs.partition_point(|&x| x <= r) - 1;
                let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> RadialField {
        RadialField::from_fn(grid.clone(), |r| self.eval(r))
    }

    /// Positive part `a₊`.
    pub fn positive_part(&self) -> Self {
        let c = self.clone();
        Coefficient::function(format!("max({c:?}, 0)"), move |r| c.eval(r).max(0.0))
    }

    /// Negative part `a₋ = max(−a, 0)`.
    pub fn negative_part(&self) -> Self {
        let c = self.clone();
        Coefficient::function(format!("max(-{c:?}, 0)"), move |r| (-c.eval(r)).max(0.0))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        if let Coefficient::Constant(c) = self {
            return Coefficient::Constant(c * factor);
        }
        let c = self.clone();
        Coefficient::function(format!("{factor}*{c:?}"), move |r| factor * c.eval(r))
    }

    pub fn shifted(&self, offset: f64) -> Self {
        if let Coefficient::Constant(c) = self {
            return Coefficient::Constant(c + offset);
        }
        let c = self.clone();
        Coefficient::function(format!("{c:?}+{offset}"), move |r| c.eval(r) + offset)
    }

    /// Extremes over `[lo, hi]` sampled at `count` equispaced points plus
    /// any table nodes inside the interval.
    pub fn range_on(&self, lo: f64, hi: f64, count: usize) -> (f64, f64) {
        if let Coefficient::Constant(c) = self {
            return (*c, *c);
        }
        let mut pts: Vec<f64> = (0..count.max(2))
            .map(|i| lo + (hi - lo) * i as f64 / (count.max(2) - 1) as f64)
            .collect();
        if let Coefficient::Samples { r, .. } = self {
            pts.extend(r.iter().copied().filter(|&x| x >= lo && x <= hi));
        }
        pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), &x| {
            let v = self.eval(x);
            (mn.min(v), mx.max(v))
        })
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "{c}"),
            Coefficient::Function { label, .. } => f.write_str(label),
            Coefficient::Samples { r, .. } => write!(f, "table[{} samples]", r.len()),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_and_range() {
        let a = Coefficient::function("1-r", |r| 1.0 - r);
        assert_eq!(a.positive_part().eval(2.0), 0.0);
        assert_eq!(a.negative_part().eval(2.0), 1.0);
        let (lo, hi) = a.range_on(0.0, 3.0, 31);
        assert!((lo + 2.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert_eq!(Coefficient::Constant(2.0).scaled(3.0).eval(7.0), 6.0);
    }

    #[test]
    fn samples_interpolate() {
        let c = Coefficient::Samples {
            r: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 2.0, 0.0],
        };
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(5.0), 0.0);
    }
}
