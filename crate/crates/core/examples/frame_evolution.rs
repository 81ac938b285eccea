//! Integrating the extended frame equations in time and comparing a
//! constant-coefficient run with the matrix exponential.

use std::f64::consts::TAU;

use pg4::curve::{AdmissibleCurve, Helix};
use pg4::flow::extended::{extended_frenet_matrix, frame_evolve, ExtendedCoeffs, GRAM_BOUND};
use pg4::frenet::FrenetApparatus;
use pg4::numerics::{expm4, Mat4};

fn main() -> pg4::error::Result<()> {
    let ap = FrenetApparatus::compute(&AdmissibleCurve::analytic(
        Helix::new(1.0, 1.0, 1.0),
        (0.0, TAU),
        64,
    )?)?;
    let frame0 = ap.points[0].frame();

    let varying = |t: f64| {
        ExtendedCoeffs::from_parts([0.3 * t.sin(), 0.0, 0.0], [1.0, 0.5 * (2.0 * t).cos(), 0.1])
    };
    let series = frame_evolve(frame0, &ap.signs, &varying, 0.0, 1e-3, 1000, GRAM_BOUND)?;
    let drift = series.gram_deviation.iter().copied().fold(0.0, f64::max);
    println!("varying coefficients: max Gram deviation {drift:.2e}");

    let fixed = ExtendedCoeffs::from_parts([0.0; 3], [1.0, 0.7, -0.4]);
    let series = frame_evolve(frame0, &ap.signs, &|_| fixed, 0.0, 1e-3, 1000, GRAM_BOUND)?;
    let m = extended_frenet_matrix(&fixed, &ap.signs);
    let exact = expm4(&m, 1.0)? * Mat4::from_fn(|i, j| frame0[i].to_array()[j]);
    let last = series.frames.last().unwrap();
    let err = (0..4)
        .flat_map(|r| (0..4).map(move |c| (r, c)))
        .map(|(r, c)| (last[r].to_array()[c] - exact[(r, c)]).abs())
        .fold(0.0, f64::max);
    println!("constant coefficients: RK4 vs exp(M t) at t = 1 differ by {err:.2e}");
    Ok(())
}
