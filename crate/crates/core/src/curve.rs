//! Admissible curves: analytic jets or uniform sample grids.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::diff;
use crate::vector::PgVec4;

/// Tolerance on `|x'(s) - 1|` for arc-length parameterized input.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;
/// Tolerance on `|x'(s) - 1|` measured by stencils on sampled input.
pub const SAMPLED_RATE_TOL: f64 = 1e-6;
/// Relative tolerance on the spacing of a sampled grid.
pub const UNIFORM_TOL: f64 = 1e-12;
/// Accuracy order of the stencils used on sampled curves.
pub const SAMPLED_ACCURACY: usize = 4;

/// Position and its first four arc-length derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurveJet {
    pub position: PgVec4,
    pub d1: PgVec4,
    pub d2: PgVec4,
    pub d3: PgVec4,
    pub d4: PgVec4,
}

/// A curve known in closed form.
pub trait AnalyticCurve: fmt::Debug + Send + Sync {
    fn jet(&self, s: f64) -> CurveJet;

    fn position(&self, s: f64) -> PgVec4 {
        self.jet(s).position
    }
}

/// `(s, b s + A sin(ω s), a cos ks, a sin ks)`; the sinusoidal wobble in the
/// second coordinate is off by default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Helix {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub wobble_amp: f64,
    pub wobble_freq: f64,
}

impl Helix {
    pub fn new(a: f64, b: f64, k: f64) -> Self {
        Self {
            a,
            b,
            k,
            wobble_amp: 0.0,
            wobble_freq: 0.0,
        }
    }

    pub fn with_wobble(mut self, amp: f64, freq: f64) -> Self {
        self.wobble_amp = amp;
        self.wobble_freq = freq;
        self
    }
}

impl AnalyticCurve for Helix {
    fn jet(&self, s: f64) -> CurveJet {
        let (a, b, k) = (self.a, self.b, self.k);
        let (sn, cs) = (k * s).sin_cos();
        let (amp, om) = (self.wobble_amp, self.wobble_freq);
        let (ws, wc) = (om * s).sin_cos();
        let y = [
            b * s + amp * ws,
            b + amp * om * wc,
            -amp * om * om * ws,
            -amp * om.powi(3) * wc,
            amp * om.powi(4) * ws,
        ];
        // z = a cos ks, w = a sin ks and their derivatives
        let z = [
            a * cs,
            -a * k * sn,
            -a * k * k * cs,
            a * k.powi(3) * sn,
            a * k.powi(4) * cs,
        ];
        let w = [
            a * sn,
            a * k * cs,
            -a * k * k * sn,
            -a * k.powi(3) * cs,
            a * k.powi(4) * sn,
        ];
        CurveJet {
            position: PgVec4::new(s, y[0], z[0], w[0]),
            d1: PgVec4::new(1.0, y[1], z[1], w[1]),
            d2: PgVec4::new(0.0, y[2], z[2], w[2]),
            d3: PgVec4::new(0.0, y[3], z[3], w[3]),
            d4: PgVec4::new(0.0, y[4], z[4], w[4]),
        }
    }
}

/// `(s, p_y(s), p_z(s), p_w(s))` with coefficients listed lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCurve {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

fn poly_derivs(c: &[f64], s: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (order, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (p, &coef) in c.iter().enumerate().skip(order).rev() {
            let falling: f64 = (p + 1 - order..=p).map(|m| m as f64).product();
            acc = acc * s + coef * falling;
        }
        *slot = acc;
    }
    out
}

impl AnalyticCurve for PolynomialCurve {
    fn jet(&self, s: f64) -> CurveJet {
        let y = poly_derivs(&self.y, s);
        let z = poly_derivs(&self.z, s);
        let w = poly_derivs(&self.w, s);
        CurveJet {
            position: PgVec4::new(s, y[0], z[0], w[0]),
            d1: PgVec4::new(1.0, y[1], z[1], w[1]),
            d2: PgVec4::new(0.0, y[2], z[2], w[2]),
            d3: PgVec4::new(0.0, y[3], z[3], w[3]),
            d4: PgVec4::new(0.0, y[4], z[4], w[4]),
        }
    }
}

/// Any closure `s -> CurveJet`.
pub struct JetFn<F>(pub F);

impl<F> fmt::Debug for JetFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JetFn")
    }
}

impl<F: Fn(f64) -> CurveJet + Send + Sync> AnalyticCurve for JetFn<F> {
    fn jet(&self, s: f64) -> CurveJet {
        (self.0)(s)
    }
}

/// Uniform parameter grid `s_i = s0 + i h`, `i < n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub s0: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid {
    /// `n` points spanning `[a, b]` inclusively.
    pub fn span(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { needed: 2, got: n });
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidInput(format!("invalid domain [{a}, {b}]")));
        }
        Ok(Self {
            s0: a,
            h: (b - a) / (n - 1) as f64,
            n,
        })
    }

    pub fn at(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.h
    }

    pub fn end(&self) -> f64 {
        self.at(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i)).collect()
    }

    /// Grid index of `s`, if it lies on a node.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        let x = (s - self.s0) / self.h;
        let i = x.round();
        if (x - i).abs() <= 1e-8 && i >= 0.0 && (i as usize) < self.n {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Index range `[ia, ib]` of a sub-domain whose endpoints are grid nodes.
    pub fn sub_range(&self, a: f64, b: f64) -> Result<(usize, usize)> {
        let out = || Error::DomainOutOfRange {
            a,
            b,
            min: self.s0,
            max: self.end(),
        };
        let ia = self.index_of(a).ok_or_else(out)?;
        let ib = self.index_of(b).ok_or_else(out)?;
        if ib <= ia {
            return Err(out());
        }
        Ok((ia, ib))
    }
}

/// Positions on a uniform grid with `x = s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    pub grid: Grid,
    pub points: Vec<PgVec4>,
}

impl SampledCurve {
    /// Validates uniform spacing of `s` and the arc-length condition `x' = 1`.
    pub fn new(s: &[f64], points: Vec<PgVec4>) -> Result<Self> {
        if s.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "{} parameter values for {} points",
                s.len(),
                points.len()
            )));
        }
        if s.len() < 2 {
            return Err(Error::GridTooSmall {
                needed: 2,
                got: s.len(),
            });
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample {p}")));
        }
        let grid = Grid::span(s[0], s[s.len() - 1], s.len())?;
        let scale = s[0].abs().max(grid.end().abs()).max(grid.h);
        for (i, &si) in s.iter().enumerate() {
            if (si - grid.at(i)).abs() > UNIFORM_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "sample grid is not uniform at index {i}"
                )));
            }
        }
        let curve = Self { grid, points };
        let dx = curve.coordinate_rate()?;
        for (i, v) in dx.iter().enumerate() {
            if (v - 1.0).abs() > SAMPLED_RATE_TOL {
                return Err(Error::NotAdmissible {
                    s: grid.at(i),
                    dx: *v,
                });
            }
        }
        Ok(curve)
    }

    /// Samples an analytic curve on `grid`.
    pub fn from_analytic(curve: &dyn AnalyticCurve, grid: Grid) -> Self {
        Self {
            grid,
            points: grid
                .points()
                .into_iter()
                .map(|s| curve.position(s))
                .collect(),
        }
    }

    fn coordinate_rate(&self) -> Result<Vec<f64>> {
        let xs: Vec<f64> = self.points.iter().map(|p| p.x).collect();
        diff(&xs, self.grid.h, 1, SAMPLED_ACCURACY)
    }

    pub fn jets(&self) -> Result<Vec<CurveJet>> {
        jets_from_samples(&self.points, self.grid.h)
    }
}

fn column(points: &[PgVec4], c: usize) -> Vec<f64> {
    points.iter().map(|p| p[c]).collect()
}

/// Arc-length jets of a curve sampled on a uniform label grid of spacing `h`.
///
/// When the label is already arc length (`x_u = 1`) the jets come straight
/// from the stencils. Otherwise derivatives are rescaled by repeated
/// application of `d/ds = (1/x_u) d/du`.
pub fn jets_from_samples(points: &[PgVec4], h: f64) -> Result<Vec<CurveJet>> {
    let n = points.len();
    let acc = SAMPLED_ACCURACY;
    let x_u = diff(&column(points, 0), h, 1, acc)?;
    for (i, v) in x_u.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(Error::NotAdmissible {
                s: i as f64 * h,
                dx: *v,
            });
        }
    }
    let unit = x_u.iter().all(|v| (v - 1.0).abs() <= ADMISSIBILITY_TOL);

    // derivs[c][order - 1] for coordinates y, z, w
    let xs = column(points, 0);
    let mut derivs: Vec<[Vec<f64>; 4]> = Vec::with_capacity(3);
    for c in 1..4 {
        let col = column(points, c);
        if unit {
            // Differentiate the residual after removing the chord in x, so
            // rounding shared with the x samples cancels before the stencils
            // amplify it.
            let slope = (col[n - 1] - col[0]) / (xs[n - 1] - xs[0]);
            let rest: Vec<f64> = col.iter().zip(&xs).map(|(v, x)| v - slope * x).collect();
            let d1 = diff(&rest, h, 1, acc)?
                .into_iter()
                .map(|v| v + slope)
                .collect();
            derivs.push([
                d1,
                diff(&rest, h, 2, acc)?,
                diff(&rest, h, 3, acc)?,
                diff(&rest, h, 4, acc)?,
            ]);
        } else {
            let mut g = col;
            let mut levels: Vec<Vec<f64>> = Vec::with_capacity(4);
            for _ in 0..4 {
                let du = diff(&g, h, 1, acc)?;
                g = du.iter().zip(&x_u).map(|(d, x)| d / x).collect();
                levels.push(g.clone());
            }
            derivs.push([
                levels[0].clone(),
                levels[1].clone(),
                levels[2].clone(),
                levels[3].clone(),
            ]);
        }
    }
    Ok((0..n)
        .map(|i| {
            let at = |o: usize| {
                PgVec4::new(
                    if o == 0 { 1.0 } else { 0.0 },
                    derivs[0][o][i],
                    derivs[1][o][i],
                    derivs[2][o][i],
                )
            };
            CurveJet {
                position: points[i],
                d1: at(0),
                d2: at(1),
                d3: at(2),
                d4: at(3),
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub enum CurveProvider {
    Analytic(Arc<dyn AnalyticCurve>),
    Sampled(SampledCurve),
}

/// A curve with `x' = 1`, given analytically or by samples, together with the
/// grid it is evaluated on.
#[derive(Clone, Debug)]
pub struct AdmissibleCurve {
    pub provider: CurveProvider,
    pub grid: Grid,
}

impl AdmissibleCurve {
    /// Analytic curve evaluated on `n` points of `[a, b]`.
    pub fn analytic(
        curve: impl AnalyticCurve + 'static,
        domain: (f64, f64),
        n: usize,
    ) -> Result<Self> {
        Self::from_arc(Arc::new(curve), domain, n)
    }

    pub fn from_arc(curve: Arc<dyn AnalyticCurve>, domain: (f64, f64), n: usize) -> Result<Self> {
        let grid = Grid::span(domain.0, domain.1, n)?;
        Ok(Self {
            provider: CurveProvider::Analytic(curve),
            grid,
        })
    }

    pub fn sampled(curve: SampledCurve) -> Self {
        Self {
            grid: curve.grid,
            provider: CurveProvider::Sampled(curve),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid.s0, self.grid.end())
    }

    /// Jet at an arbitrary `s` (analytic) or at a grid node (sampled).
    pub fn jet_at(&self, s: f64) -> Result<CurveJet> {
        let (lo, hi) = self.domain();
        let slack = 1e-9 * self.grid.h;
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::DomainOutOfRange {
                a: s,
                b: s,
                min: lo,
                max: hi,
            });
        }
        let jet = match &self.provider {
            CurveProvider::Analytic(c) => c.jet(s),
            CurveProvider::Sampled(c) => {
                let i = self.grid.index_of(s).ok_or_else(|| {
                    Error::InvalidInput(format!("s = {s} is not a node of the sample grid"))
                })?;
                c.jets()?[i]
            }
        };
        check_admissible(&jet, s)?;
        Ok(jet)
    }

    /// Jets at every grid node.
    pub fn jets(&self) -> Result<Vec<CurveJet>> {
        let jets = match &self.provider {
            CurveProvider::Analytic(c) => {
                self.grid.points().into_iter().map(|s| c.jet(s)).collect()
            }
            CurveProvider::Sampled(c) => c.jets()?,
        };
        for (i, j) in jets.iter().enumerate() {
            check_admissible(j, self.grid.at(i))?;
        }
        Ok(jets)
    }

    pub fn positions(&self) -> Vec<PgVec4> {
        match &self.provider {
            CurveProvider::Analytic(c) => self
                .grid
                .points()
                .into_iter()
                .map(|s| c.position(s))
                .collect(),
            CurveProvider::Sampled(c) => c.points.clone(),
        }
    }
}

fn check_admissible(jet: &CurveJet, s: f64) -> Result<()> {
    if (jet.d1.x - 1.0).abs() > ADMISSIBILITY_TOL {
        return Err(Error::NotAdmissible { s, dx: jet.d1.x });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // 1 + 2s + 3s^2 + 4s^3 + 5s^4
        let c = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s: f64 = 0.5;
        let d = poly_derivs(&c, s);
        let want = [
            1.0 + 2.0 * s + 3.0 * s * s + 4.0 * s.powi(3) + 5.0 * s.powi(4),
            2.0 + 6.0 * s + 12.0 * s * s + 20.0 * s.powi(3),
            6.0 + 24.0 * s + 60.0 * s * s,
            24.0 + 120.0 * s,
            120.0,
        ];
        for (g, w) in d.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn helix_jet_matches_hand_derivatives() {
        let h = Helix::new(2.0, 0.5, 3.0);
        let s = 0.3;
        let j = h.jet(s);
        assert_eq!(j.d1.x, 1.0);
        assert_eq!(j.d1.y, 0.5);
        assert!((j.d1.z + 6.0 * (0.9f64).sin()).abs() < 1e-14);
        assert!((j.d2.w + 18.0 * (0.9f64).sin()).abs() < 1e-13);
    }

    #[test]
    fn sampled_jets_approach_analytic() {
        let h = Helix::new(1.0, 1.0, 1.0);
        let grid = Grid::span(0.0, 2.0, 201).unwrap();
        let sc = SampledCurve::from_analytic(&h, grid);
        let jets = sc.jets().unwrap();
        for (i, j) in jets.iter().enumerate() {
            let exact = h.jet(grid.at(i));
            assert!((j.d1 - exact.d1).max_abs() < 1e-7);
            assert!((j.d3 - exact.d3).max_abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_non_admissible_samples() {
        let s: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let pts: Vec<PgVec4> = s
            .iter()
            .map(|&u| PgVec4::new(2.0 * u, u, 0.0, 0.0))
            .collect();
        assert!(matches!(
            SampledCurve::new(&s, pts),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn rejects_non_uniform_samples() {
        let mut s: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        s[7] += 0.01;
        let pts: Vec<PgVec4> = s.iter().map(|&u| PgVec4::new(u, u, 0.0, 0.0)).collect();
        assert!(SampledCurve::new(&s, pts).is_err());
    }

    #[test]
    fn stretched_label_is_rescaled() {
        // x = 2u: arc-length derivatives are half the label derivatives
        let n = 101;
        let h = 0.02;
        let pts: Vec<PgVec4> = (0..n)
            .map(|i| {
                let u = i as f64 * h;
                PgVec4::new(2.0 * u, (2.0 * u).sin(), 0.0, 0.0)
            })
            .collect();
        let jets = jets_from_samples(&pts, h).unwrap();
        for (i, j) in jets.iter().enumerate().skip(5).take(80) {
            let s = 2.0 * i as f64 * h;
            assert!((j.d1.y - s.cos()).abs() < 1e-6);
            assert!((j.d2.y + s.sin()).abs() < 1e-5);
        }
    }

    #[test]
    fn sub_ranges() {
        let g = Grid::span(0.0, 1.0, 11).unwrap();
        assert_eq!(g.sub_range(0.2, 0.7).unwrap(), (2, 7));
        assert!(matches!(
            g.sub_range(0.25, 0.7),
            Err(Error::DomainOutOfRange { .. })
        ));
        assert!(g.sub_range(0.0, 1.5).is_err());
    }
}
