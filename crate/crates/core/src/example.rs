//! Reference values for the helix `α(s) = (s, bs, a cos ks, a sin ks)`,
//! set against the computed apparatus.
//!
//! Some published values for this curve disagree with direct computation.
//! The report prints both sides and tags the difference; it never decides
//! which one is right.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curve::{AdmissibleCurve, Grid, Helix};
use crate::error::Result;
use crate::flow::evolve::History;
use crate::flow::extended::gamma_coeffs_numeric;
use crate::frenet::{FrenetApparatus, Signs};
use crate::numerics::{simpson_with_estimate, Quadrature};

/// Agreement threshold for the side-by-side rows.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub quantity: String,
    /// The stated expression, as text.
    pub stated: String,
    pub stated_value: f64,
    pub computed: f64,
    pub discrepancy: bool,
}

impl Row {
    fn new(
        quantity: impl Into<String>,
        stated: impl Into<String>,
        stated_value: f64,
        computed: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            stated: stated.into(),
            stated_value,
            computed,
            discrepancy: (stated_value - computed).abs() > MATCH_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub signs: Signs,
    pub rows: Vec<Row>,
}

impl ExampleReport {
    pub fn discrepancies(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.discrepancy)
    }
}

impl fmt::Display for ExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.signs;
        writeln!(f, "helix a = {}, b = {}, k = {}", self.a, self.b, self.k)?;
        writeln!(
            f,
            "signs (eps1, eps2, eps3) = ({:+}, {:+}, {:+}), mu = {:+}",
            e.eps1, e.eps2, e.eps3, e.mu
        )?;
        writeln!(
            f,
            "{:<28} {:<22} {:>22} {:>22}",
            "quantity", "stated", "stated value", "computed"
        )?;
        for r in &self.rows {
            let tag = if r.discrepancy { "  DISCREPANCY" } else { "" };
            writeln!(
                f,
                "{:<28} {:<22} {:>22.15e} {:>22.15e}{tag}",
                r.quantity, r.stated, r.stated_value, r.computed
            )?;
        }
        Ok(())
    }
}

/// `½∫₀^T a k cos kt dt` by composite Simpson on `n` samples.
pub fn stated_b2_t_angle(a: f64, k: f64, t_end: f64, n: usize) -> Result<Quadrature> {
    let grid = Grid::span(0.0, t_end, n)?;
    let samples: Vec<f64> = grid
        .points()
        .iter()
        .map(|t| 0.5 * a * k * (k * t).cos())
        .collect();
    simpson_with_estimate(&samples, grid.h)
}

/// Builds the report on `n` grid points over `[0, 2π]`.
///
/// `Γ₁` is measured on the motion `Ω(s, t) = α(s + t)`, along which the time
/// and arc-length derivatives coincide, at the middle node and at
/// `t = 0, 0.25, 0.5, 0.75, 1`.
pub fn helix_example(a: f64, b: f64, k: f64, n: usize) -> Result<ExampleReport> {
    let helix = Helix::new(a, b, k);
    let curve = AdmissibleCurve::from_arc(Arc::new(helix), (0.0, std::f64::consts::TAU), n)?;
    let ap = FrenetApparatus::compute(&curve)?;
    let worst = |v: Vec<f64>, target: f64| {
        v.into_iter().fold(target, |w, x| {
            if (x - target).abs() > (w - target).abs() {
                x
            } else {
                w
            }
        })
    };
    let mut rows = vec![
        Row::new(
            "kappa (worst node)",
            "a k^2",
            a * k * k,
            worst(ap.kappa(), a * k * k),
        ),
        Row::new("tau (worst node)", "k", k, worst(ap.tau(), k)),
        Row::new("sigma (worst node)", "0", 0.0, worst(ap.sigma(), 0.0)),
    ];

    let dt = 1e-3;
    let history = History::transported(&helix, 1.0, curve.grid, 0.0, dt, 1001)?;
    let gamma = gamma_coeffs_numeric(&history)?;
    let mid = curve.grid.n / 2;
    for j in [0, 250, 500, 750, 1000] {
        let t = history.time(j);
        rows.push(Row::new(
            format!("Gamma1 at t = {t:.2}"),
            "k cos 2kt",
            k * (2.0 * k * t).cos(),
            gamma[j][mid][0],
        ));
    }

    // the stated t-line energy of N opens with -t, i.e. a leading sign -1
    rows.push(Row::new(
        "E_N t-line leading sign",
        "-1",
        -1.0,
        ap.signs.eps1,
    ));

    let t_end = 1.0;
    let q = stated_b2_t_angle(a, k, t_end, 101)?;
    rows.push(Row::new(
        "A_t(B2) over [0, 1]",
        "(a/2) sin kT",
        0.5 * a * (k * t_end).sin(),
        q.value,
    ));

    Ok(ExampleReport {
        a,
        b,
        k,
        signs: ap.signs,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_report() {
        let r = helix_example(1.0, 1.0, 1.0, 256).unwrap();
        assert_eq!((r.signs.eps1, r.signs.eps2, r.signs.eps3), (1.0, 1.0, -1.0));
        assert!(!r.rows[0].discrepancy && !r.rows[1].discrepancy && !r.rows[2].discrepancy);
        let g0 = &r.rows[3];
        assert!((g0.computed - 1.0).abs() < 1e-5);
        let text = r.to_string();
        assert!(text.contains("DISCREPANCY"));
    }
}
