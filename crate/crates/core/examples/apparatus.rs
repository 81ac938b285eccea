//! Frame and curvatures of a helix from its closed form and from samples.

use std::f64::consts::TAU;

use pg4::curve::{AdmissibleCurve, Helix, SampledCurve};
use pg4::frenet::FrenetApparatus;

fn main() -> pg4::error::Result<()> {
    let helix = Helix::new(1.0, 1.0, 2.0);
    let curve = AdmissibleCurve::analytic(helix, (0.0, TAU), 256)?;
    let ap = FrenetApparatus::compute(&curve)?;
    let e = ap.signs;
    println!(
        "signs ({:+}, {:+}, {:+}), mu {:+}",
        e.eps1, e.eps2, e.eps3, e.mu
    );

    let p = &ap.points[100];
    println!(
        "s = {:.4}: kappa {:.12}, tau {:.12}, sigma {:.3e}",
        p.s, p.kappa, p.tau, p.sigma
    );
    println!("T  = {:?}", p.tangent);
    println!("N  = {:?}", p.normal);
    println!("B1 = {:?}", p.binormal1);
    println!("B2 = {:?}", p.binormal2);
    println!("max Gram deviation {:.2e}", ap.max_gram_deviation());

    let sampled = AdmissibleCurve::sampled(SampledCurve::from_analytic(&helix, curve.grid));
    let sp = FrenetApparatus::compute(&sampled)?;
    let worst = sp
        .kappa()
        .iter()
        .map(|k| (k - 4.0).abs())
        .fold(0.0, f64::max);
    println!("sampled provider: worst kappa error {worst:.2e}");
    Ok(())
}
