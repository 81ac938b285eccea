//! Library results checked against oracles written independently here.

use pg4::curve::{AdmissibleCurve, PolynomialCurve};
use pg4::frenet::FrenetApparatus;
use pg4::numerics::det4;
use pg4::vector::{pg_cross, PgVec4};

/// Derivatives 0..=4 of `Σ c_p s^p`, by repeated term-wise differentiation.
fn poly(c: &[f64], s: f64) -> [f64; 5] {
    let mut coeffs = c.to_vec();
    let mut out = [0.0; 5];
    for slot in out.iter_mut() {
        *slot = coeffs.iter().rev().fold(0.0, |acc, &a| acc * s + a);
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, &a)| p as f64 * a)
            .collect();
    }
    out
}

/// Scalar product on the isotropic part, signature `(-, +, +)`.
fn lorentz(u: [f64; 3], v: [f64; 3]) -> f64 {
    -u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn leibniz(m: [[f64; 4]; 4]) -> f64 {
    let mut total = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if !distinct {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                    total += sign * m[0][a] * m[1][b] * m[2][c] * m[3][d];
                }
            }
        }
    }
    total
}

// For an arc-length curve in the isotropic 3-space the derivatives satisfy
// |α''| = κ, the part of α''' orthogonal to α'' has length κτ, and the
// volume spanned by α'', α''', α'''' is κ³τ²σ.
#[test]
fn quartic_curvatures_match_volume_oracle() {
    let y = vec![0.0, 0.0, 0.1, 0.0, 0.0];
    let z = vec![0.0, 0.0, 1.0, 0.2, 0.0];
    let w = vec![0.0, 0.0, 0.0, 1.0 / 3.0, 0.05];
    let curve = PolynomialCurve {
        y: y.clone(),
        z: z.clone(),
        w: w.clone(),
    };
    let ap = FrenetApparatus::compute(&AdmissibleCurve::analytic(curve, (0.5, 1.5), 33).unwrap())
        .unwrap();
    for p in &ap.points {
        let (dy, dz, dw) = (poly(&y, p.s), poly(&z, p.s), poly(&w, p.s));
        let d = |k: usize| [dy[k], dz[k], dw[k]];
        let (d2, d3, d4) = (d(2), d(3), d(4));
        let kappa = lorentz(d2, d2).abs().sqrt();
        let along = lorentz(d3, d2) / lorentz(d2, d2);
        let perp = [0, 1, 2].map(|i| d3[i] - along * d2[i]);
        let kappa_tau = lorentz(perp, perp).abs().sqrt();
        let tau = kappa_tau / kappa;
        let sigma = det3(d2, d3, d4).abs() / (kappa.powi(3) * tau * tau);

        assert!(
            (p.kappa - kappa).abs() < 1e-12 * kappa.max(1.0),
            "kappa at {}",
            p.s
        );
        assert!((p.tau - tau).abs() < 1e-10 * tau.max(1.0), "tau at {}", p.s);
        assert!(sigma > 1e-3, "oracle curve should have nonzero sigma");
        assert!(
            (p.sigma.abs() - sigma).abs() < 1e-9 * sigma.max(1.0),
            "sigma {} vs {sigma} at {}",
            p.sigma,
            p.s
        );
    }
}

#[test]
fn det4_matches_leibniz_expansion() {
    let cols = [
        PgVec4::new(1.0, 2.0, -0.5, 3.0),
        PgVec4::new(0.0, 1.5, 2.0, -1.0),
        PgVec4::new(2.0, -3.0, 0.25, 4.0),
        PgVec4::new(-1.0, 0.5, 1.0, 2.0),
    ];
    let m = [0, 1, 2, 3].map(|r| [0, 1, 2, 3].map(|c| cols[c].to_array()[r]));
    assert!((det4(cols) - leibniz(m)).abs() < 1e-12);
}

/// Cross product as the formal determinant with basis symbols in the first
/// row, each cofactor taken from a full Leibniz expansion.
fn cross_oracle(u: PgVec4, v: PgVec4, w: PgVec4, head: [f64; 4]) -> PgVec4 {
    let mut out = [0.0; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        *slot = head[j] * leibniz([e, u.to_array(), v.to_array(), w.to_array()]);
    }
    PgVec4::from_array(out)
}

#[test]
fn cross_matches_formal_determinant() {
    let (u, v, w) = (
        PgVec4::new(1.0, 0.3, -1.2, 0.7),
        PgVec4::new(0.0, 2.0, 0.5, -1.0),
        PgVec4::new(0.0, -0.4, 1.1, 0.9),
    );
    let got = pg_cross(u, v, w);
    let want = cross_oracle(u, v, w, [0.0, -1.0, 1.0, 1.0]);
    assert!((got - want).max_abs() < 1e-12, "{got:?} vs {want:?}");

    let u0 = PgVec4::new(0.0, 0.3, -1.2, 0.7);
    let got = pg_cross(u0, v, w);
    let want = cross_oracle(u0, v, w, [-1.0, 1.0, 1.0, 1.0]);
    assert!((got - want).max_abs() < 1e-12, "{got:?} vs {want:?}");
}
