//! Finite-difference stencils on uniform grids.
//!
//! Weights are the exact solution of the Vandermonde moment system
//! `sum_j w_j o_j^p = p! [p = d]`, obtained from the Lagrange form of its
//! inverse with integer arithmetic and rounded once to `f64`. Every stencil
//! re-checks its moment conditions when it is built.

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub derivative: usize,
    pub accuracy: usize,
    pub offsets: Vec<i64>,
    /// Weights for unit spacing; divide the weighted sum by `h^derivative`.
    pub weights: Vec<f64>,
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

impl Stencil {
    /// Builds the weights for an arbitrary set of distinct integer offsets.
    pub fn from_offsets(derivative: usize, offsets: Vec<i64>) -> Result<Self> {
        let m = offsets.len();
        if m <= derivative {
            return Err(Error::InvalidInput(format!(
                "{m} points cannot resolve derivative order {derivative}"
            )));
        }
        for (i, a) in offsets.iter().enumerate() {
            if offsets[i + 1..].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate stencil offset {a}")));
            }
        }

        let mut weights = Vec::with_capacity(m);
        for (j, &oj) in offsets.iter().enumerate() {
            // Numerator polynomial prod_{k != j} (x - o_k), lowest degree first.
            let mut poly: Vec<i128> = vec![1];
            let mut denom: i128 = 1;
            for (k, &ok) in offsets.iter().enumerate() {
                if k == j {
                    continue;
                }
                let mut next = vec![0i128; poly.len() + 1];
                for (p, c) in poly.iter().enumerate() {
                    next[p + 1] += c;
                    next[p] -= c * ok as i128;
                }
                poly = next;
                denom *= (oj - ok) as i128;
            }
            let num = factorial(derivative) * poly[derivative];
            weights.push(num as f64 / denom as f64);
        }

        let stencil = Self {
            derivative,
            accuracy: m - derivative,
            offsets,
            weights,
        };
        stencil.check_moments()?;
        Ok(stencil)
    }

    /// Symmetric stencil of the requested (even) accuracy order.
    pub fn central(derivative: usize, accuracy: usize) -> Result<Self> {
        check_orders(derivative, accuracy)?;
        let half = (derivative.div_ceil(2) - 1 + accuracy / 2) as i64;
        let mut s = Self::from_offsets(derivative, (-half..=half).collect())?;
        s.accuracy = accuracy;
        Ok(s)
    }

    /// `derivative + accuracy` consecutive offsets starting at `start`.
    pub fn shifted(derivative: usize, accuracy: usize, start: i64) -> Result<Self> {
        check_orders(derivative, accuracy)?;
        let width = (derivative + accuracy) as i64;
        Self::from_offsets(derivative, (start..start + width).collect())
    }

    pub fn width(&self) -> usize {
        self.offsets.len()
    }

    /// Largest moment defect over the orders the stencil is exact for.
    pub fn moment_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in 0..self.offsets.len() {
            let mut sum = 0.0;
            let mut scale = 0.0;
            for (w, &o) in self.weights.iter().zip(&self.offsets) {
                let term = w * (o as f64).powi(p as i32);
                sum += term;
                scale += term.abs();
            }
            let target = if p == self.derivative {
                factorial(p) as f64
            } else {
                0.0
            };
            worst = worst.max((sum - target).abs() / scale.max(1.0));
        }
        worst
    }

    fn check_moments(&self) -> Result<()> {
        let defect = self.moment_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "stencil {:?} violates its moment conditions by {defect:e}",
                self.offsets
            )));
        }
        Ok(())
    }

    /// Weighted sum around sample `i`, scaled by `h^-derivative`.
    pub fn apply(&self, samples: &[f64], i: usize, h: f64) -> f64 {
        let mut acc = 0.0;
        for (w, &o) in self.weights.iter().zip(&self.offsets) {
            acc += w * samples[(i as i64 + o) as usize];
        }
        acc / h.powi(self.derivative as i32)
    }
}

fn check_orders(derivative: usize, accuracy: usize) -> Result<()> {
    if !(1..=4).contains(&derivative) {
        return Err(Error::InvalidInput(format!(
            "derivative order {derivative} outside 1..=4"
        )));
    }
    if accuracy < 2 || !accuracy.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "accuracy order {accuracy} must be even and >= 2"
        )));
    }
    Ok(())
}

/// Central stencil for the interior plus shifted stencils for both boundary
/// bands, all of the same accuracy order.
#[derive(Clone, Debug)]
pub struct Differentiator {
    pub derivative: usize,
    pub accuracy: usize,
    central: Stencil,
    /// `left[i]` serves grid point `i`.
    left: Vec<Stencil>,
    /// `right[k]` serves grid point `n - 1 - k`.
    right: Vec<Stencil>,
}

impl Differentiator {
    pub fn new(derivative: usize, accuracy: usize) -> Result<Self> {
        let central = Stencil::central(derivative, accuracy)?;
        let half = (central.width() / 2) as i64;
        let width = (derivative + accuracy) as i64;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for i in 0..half {
            left.push(Stencil::shifted(derivative, accuracy, -i)?);
            right.push(Stencil::shifted(derivative, accuracy, i - width + 1)?);
        }
        Ok(Self {
            derivative,
            accuracy,
            central,
            left,
            right,
        })
    }

    /// Shared instance for accuracy 2, 4 or 6; built on demand otherwise.
    pub fn cached(derivative: usize, accuracy: usize) -> Result<std::borrow::Cow<'static, Self>> {
        static CACHE: OnceLock<Vec<Differentiator>> = OnceLock::new();
        let table = CACHE.get_or_init(|| {
            let mut v = Vec::new();
            for d in 1..=4 {
                for acc in [2, 4, 6] {
                    v.push(Differentiator::new(d, acc).expect("built-in stencil"));
                }
            }
            v
        });
        if (1..=4).contains(&derivative) && matches!(accuracy, 2 | 4 | 6) {
            let idx = (derivative - 1) * 3 + accuracy / 2 - 1;
            Ok(std::borrow::Cow::Borrowed(&table[idx]))
        } else {
            Ok(std::borrow::Cow::Owned(Self::new(derivative, accuracy)?))
        }
    }

    /// Fewest samples this operator can differentiate.
    pub fn min_samples(&self) -> usize {
        self.central.width().max(self.derivative + self.accuracy)
    }

    pub fn apply(&self, samples: &[f64], h: f64) -> Result<Vec<f64>> {
        let n = samples.len();
        if n < self.min_samples() {
            return Err(Error::GridTooSmall {
                needed: self.min_samples(),
                got: n,
            });
        }
        let half = self.left.len();
        Ok((0..n)
            .map(|i| {
                if i < half {
                    self.left[i].apply(samples, i, h)
                } else if i >= n - half {
                    self.right[n - 1 - i].apply(samples, i, h)
                } else {
                    self.central.apply(samples, i, h)
                }
            })
            .collect())
    }
}

/// Derivative of uniformly spaced samples.
pub fn diff(samples: &[f64], h: f64, derivative: usize, accuracy: usize) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "grid spacing {h} must be positive"
        )));
    }
    Differentiator::cached(derivative, accuracy)?.apply(samples, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_weights() {
        let s = Stencil::central(1, 2).unwrap();
        assert_eq!(s.offsets, vec![-1, 0, 1]);
        assert_eq!(s.weights, vec![-0.5, 0.0, 0.5]);

        let s = Stencil::central(2, 4).unwrap();
        let expect = [
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ];
        for (w, e) in s.weights.iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }

        let s = Stencil::shifted(1, 2, 0).unwrap();
        assert_eq!(s.weights, vec![-1.5, 2.0, -0.5]);
    }

    #[test]
    fn widths() {
        assert_eq!(Stencil::central(1, 4).unwrap().width(), 5);
        assert_eq!(Stencil::central(2, 4).unwrap().width(), 5);
        assert_eq!(Stencil::central(3, 4).unwrap().width(), 7);
        assert_eq!(Stencil::central(4, 4).unwrap().width(), 7);
        assert_eq!(Stencil::shifted(4, 4, 0).unwrap().width(), 8);
    }

    #[test]
    fn every_builtin_stencil_passes_moments() {
        for d in 1..=4 {
            for acc in [2, 4, 6] {
                let op = Differentiator::new(d, acc).unwrap();
                assert!(op.central.moment_defect() < 1e-12);
                for s in op.left.iter().chain(&op.right) {
                    assert!(s.moment_defect() < 1e-12, "{d} {acc} {:?}", s.offsets);
                }
            }
        }
    }

    #[test]
    fn square_has_constant_second_derivative() {
        let h = 0.37;
        let xs: Vec<f64> = (0..20).map(|i| (i as f64 * h).powi(2)).collect();
        for v in diff(&xs, h, 2, 4).unwrap() {
            assert!((v - 2.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn constants_differentiate_to_zero() {
        let xs = vec![3.25; 16];
        for d in 1..=4 {
            for v in diff(&xs, 0.1, d, 4).unwrap() {
                assert!(v.abs() < 1e-9, "order {d}: {v}");
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let err = diff(&[1.0, 2.0, 3.0], 0.1, 4, 4).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall { needed: 8, got: 3 }));
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(diff(&[0.0; 20], 0.1, 5, 4).is_err());
        assert!(diff(&[0.0; 20], 0.1, 1, 3).is_err());
        assert!(diff(&[0.0; 20], 0.0, 1, 4).is_err());
    }
}
