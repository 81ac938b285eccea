//! Stencils, quadrature and observed convergence order.

use std::f64::consts::PI;

use pg4::numerics::{diff, observed_order, simpson_with_estimate, Stencil};

fn main() -> pg4::error::Result<()> {
    for acc in [2, 4, 6] {
        let st = Stencil::central(1, acc)?;
        println!(
            "first derivative, order {acc}: offsets {:?} weights {:?}",
            st.offsets, st.weights
        );
    }

    let mut errors = Vec::new();
    for n in [21, 41, 81, 161] {
        let h = PI / (n - 1) as f64;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let q = simpson_with_estimate(&s, h)?;
        let d = diff(&s, h, 1, 4)?;
        let derr = d
            .iter()
            .enumerate()
            .map(|(i, v)| (v - (i as f64 * h).cos()).abs())
            .fold(0.0, f64::max);
        println!(
            "n = {n:>3}: integral error {:.3e} (estimate {:.3e}), derivative error {derr:.3e}",
            (q.value - 2.0).abs(),
            q.error_estimate.unwrap_or(f64::NAN)
        );
        errors.push((h, (q.value - 2.0).abs()));
    }
    println!("observed quadrature order {:.3}", observed_order(&errors)?);
    Ok(())
}
