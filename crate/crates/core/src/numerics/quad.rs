//! Composite Simpson quadrature on uniform grids.

use crate::error::{Error, Result};

/// Value of a composite rule together with its Richardson error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// `|S(h) - S(2h)| / 15`, or `None` when the grid is too coarse to halve.
    pub error_estimate: Option<f64>,
    /// Whether a closing 3/8-rule panel was used (odd number of intervals).
    pub three_eighths_tail: bool,
}

fn simpson_even(samples: &[f64], h: f64) -> f64 {
    let m = samples.len() - 1;
    debug_assert!(m.is_multiple_of(2));
    if m == 0 {
        return 0.0;
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..m {
        if i % 2 == 1 {
            odd += samples[i];
        } else {
            even += samples[i];
        }
    }
    h / 3.0 * (samples[0] + 4.0 * odd + 2.0 * even + samples[m])
}

fn three_eighths(p: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (p[0] + 3.0 * p[1] + 3.0 * p[2] + p[3])
}

/// Composite Simpson over all samples; an odd interval count closes with a
/// 3/8-rule panel over the last three intervals.
pub fn simpson(samples: &[f64], h: f64) -> Result<f64> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::GridTooSmall { needed: 3, got: n });
    }
    let m = n - 1;
    if m.is_multiple_of(2) {
        Ok(simpson_even(samples, h))
    } else {
        let head = &samples[..n - 3];
        Ok(simpson_even(head, h) + three_eighths(&samples[n - 4..], h))
    }
}

/// [`simpson`] plus a Richardson estimate from the even-indexed subgrid.
pub fn simpson_with_estimate(samples: &[f64], h: f64) -> Result<Quadrature> {
    let value = simpson(samples, h)?;
    let m = samples.len() - 1;
    // Largest even-interval prefix whose halved grid still has two intervals.
    let m_even = m - m % 2;
    let error_estimate = if m_even >= 4 {
        let fine = simpson(&samples[..=m_even], h)?;
        let coarse: Vec<f64> = samples[..=m_even].iter().step_by(2).copied().collect();
        let coarse = simpson(&coarse, 2.0 * h)?;
        Some((fine - coarse).abs() / 15.0)
    } else {
        None
    };
    Ok(Quadrature {
        value,
        error_estimate,
        three_eighths_tail: m % 2 == 1,
    })
}

/// Running integral `∫_{x0}^{x_i}` at every sample.
///
/// Even indices accumulate Simpson panels; odd indices add a quadratic
/// half-panel, so every entry is third-order accurate.
pub fn cumulative_simpson(samples: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::GridTooSmall { needed: 3, got: n });
    }
    let mut out = vec![0.0; n];
    let mut i = 1;
    while i < n {
        if i + 1 < n {
            let (a, b, c) = (samples[i - 1], samples[i], samples[i + 1]);
            out[i] = out[i - 1] + h / 12.0 * (5.0 * a + 8.0 * b - c);
            out[i + 1] = out[i - 1] + h / 3.0 * (a + 4.0 * b + c);
            i += 2;
        } else {
            let (a, b, c) = (samples[i - 2], samples[i - 1], samples[i]);
            out[i] = out[i - 1] + h / 12.0 * (-a + 8.0 * b + 5.0 * c);
            i += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_over_half_period() {
        let n = 101;
        let h = std::f64::consts::PI / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let q = simpson_with_estimate(&ys, h).unwrap();
        // leading error term h^4/180 * ∫ sin
        let predicted = h.powi(4) / 90.0;
        assert!(((q.value - 2.0) - predicted).abs() < 1e-11);
        assert!(!q.three_eighths_tail);
        let est = q.error_estimate.unwrap();
        assert!(est > 0.0 && est < 1e-7);
    }

    #[test]
    fn cubic_is_exact_for_both_parities() {
        for n in [3usize, 4, 5, 10, 11, 64] {
            let h = 1.0 / (n - 1) as f64;
            let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            let v = simpson(&ys, h).unwrap();
            assert!((v - 0.25).abs() < 1e-15, "n = {n}: {v}");
        }
    }

    #[test]
    fn constant_integrand() {
        let ys = vec![1.5; 12];
        assert!((simpson(&ys, 0.5).unwrap() - 1.5 * 5.5).abs() < 1e-14);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            simpson(&[1.0, 2.0], 0.1),
            Err(Error::GridTooSmall { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn cumulative_matches_quadratics() {
        let n = 9;
        let h = 0.25;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(2)).collect();
        let c = cumulative_simpson(&ys, h).unwrap();
        for (i, v) in c.iter().enumerate() {
            let x = i as f64 * h;
            assert!((v - x.powi(3) / 3.0).abs() < 1e-14, "{i}");
        }
    }
}
