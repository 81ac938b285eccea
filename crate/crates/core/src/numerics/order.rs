//! Observed convergence order from refinement studies.

use crate::error::{Error, Result};

/// Errors at or below this level are treated as round-off.
pub const SATURATION_FLOOR: f64 = 1e-14;

/// Least-squares slope of `log err` against `log h`.
pub fn observed_order(errors: &[(f64, f64)]) -> Result<f64> {
    observed_order_with_floor(errors, SATURATION_FLOOR)
}

/// As [`observed_order`] with an explicit round-off floor. Levels whose error
/// is at or below `floor` are excluded from the fit.
pub fn observed_order_with_floor(errors: &[(f64, f64)], floor: f64) -> Result<f64> {
    if errors.len() < 2 {
        return Err(Error::DegenerateFit { saturated: false });
    }
    if errors
        .iter()
        .any(|&(h, e)| !(h > 0.0) || !e.is_finite() || e < 0.0)
    {
        return Err(Error::InvalidInput(
            "refinement data needs positive spacings and finite non-negative errors".into(),
        ));
    }
    let usable: Vec<(f64, f64)> = errors
        .iter()
        .filter(|&&(_, e)| e > floor)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    if usable.len() < 2 {
        let saturated = errors.iter().all(|&(_, e)| e <= floor);
        return Err(Error::DegenerateFit { saturated });
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { saturated: false });
    }
    Ok(sxy / sxx)
}
