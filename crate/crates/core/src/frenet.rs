//! Frenet apparatus of admissible curves.
//!
//! Everything is computed pointwise from the arc-length jet of the curve.
//! For `T = α'` the isotropic part of `α''` carries the curvature, and the
//! remaining frame vectors and their derivatives follow by the quotient
//! rule, so no differencing of frames is needed.

use serde::Serialize;

use crate::curve::{AdmissibleCurve, CurveJet, Grid};
use crate::error::{Error, Result};
use crate::numerics::{det4, Mat4};
use crate::vector::{pg_cross, pg_dot, PgVec4};

pub const KAPPA_MIN: f64 = 1e-9;
pub const TAU_MIN: f64 = 1e-9;
/// Tolerance for Gram entries and unit determinants of computed frames.
pub const FRAME_TOL: f64 = 1e-8;

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Causal signs `ε₁ = <N,N>`, `ε₂ = <B₁,B₁>`, `ε₃ = <B₂,B₂>` and the
/// orientation factor `μ` of the fourth frame vector. Each is `±1.0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Signs {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub mu: f64,
}

impl Signs {
    /// `ε₃` forced by the other two: `+1` when either is timelike.
    pub fn eps3_rule(eps1: f64, eps2: f64) -> f64 {
        if eps1 < 0.0 || eps2 < 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Signs with `ε₃` taken from the rule and `μ = 1`.
    pub fn from_pair(eps1: f64, eps2: f64) -> Self {
        Self {
            eps1,
            eps2,
            eps3: Self::eps3_rule(eps1, eps2),
            mu: 1.0,
        }
    }

    /// `diag(1, ε₁, ε₂, ε₃)`.
    pub fn gram(&self) -> [f64; 4] {
        [1.0, self.eps1, self.eps2, self.eps3]
    }
}

/// Frame, curvatures and the first derivatives the kernel produces along
/// the way, at a single parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FramePoint {
    pub s: f64,
    pub position: PgVec4,
    pub tangent: PgVec4,
    pub normal: PgVec4,
    pub binormal1: PgVec4,
    pub binormal2: PgVec4,
    pub kappa: f64,
    pub tau: f64,
    pub sigma: f64,
}

impl FramePoint {
    pub fn frame(&self) -> [PgVec4; 4] {
        [self.tangent, self.normal, self.binormal1, self.binormal2]
    }
}

/// Intermediate quantities before the global signs are fixed.
#[derive(Clone, Copy, Debug)]
struct RawFrame {
    tangent: PgVec4,
    normal: PgVec4,
    binormal1: PgVec4,
    binormal1_s: PgVec4,
    cross: PgVec4,
    kappa: f64,
    tau: f64,
    eps1: f64,
    eps2: f64,
    orientation: f64,
}

fn curvature_of(jet: &CurveJet) -> f64 {
    pg_dot(jet.d2, jet.d2).abs().sqrt()
}

fn raw_frame(jet: &CurveJet, index: Option<usize>, s: f64) -> Result<RawFrame> {
    let (d2, d3, d4) = (jet.d2, jet.d3, jet.d4);
    let q = pg_dot(d2, d2);
    let kappa = q.abs().sqrt();
    if kappa <= KAPPA_MIN {
        if d2.max_abs() > KAPPA_MIN {
            return Err(Error::LightlikeDegeneracy {
                index,
                s,
                what: format!("principal normal is lightlike (<α'',α''> = {q:e})"),
            });
        }
        return Err(Error::FrenetDegenerate {
            index,
            s,
            quantity: "kappa",
            value: kappa,
        });
    }
    let eps1 = sign(q);
    let normal = d2 / kappa;
    let kappa_s = eps1 * pg_dot(d2, d3) / kappa;
    let normal_s = d3 / kappa - d2 * (kappa_s / (kappa * kappa));
    let kappa_ss = eps1 * (pg_dot(d3, d3) + pg_dot(d2, d4)) / kappa - kappa_s * kappa_s / kappa;
    let k2 = kappa * kappa;
    let normal_ss = d4 / kappa - d3 * (2.0 * kappa_s / k2) - d2 * (kappa_ss / k2)
        + d2 * (2.0 * kappa_s * kappa_s / (k2 * kappa));

    let p = pg_dot(normal_s, normal_s);
    let tau = p.abs().sqrt();
    if tau <= TAU_MIN {
        if normal_s.max_abs() > TAU_MIN {
            return Err(Error::LightlikeDegeneracy {
                index,
                s,
                what: format!("first binormal is lightlike (<N',N'> = {p:e})"),
            });
        }
        return Err(Error::FrenetDegenerate {
            index,
            s,
            quantity: "tau",
            value: tau,
        });
    }
    let eps2 = sign(p);
    let tau_s = eps2 * pg_dot(normal_s, normal_ss) / tau;
    let binormal1 = normal_s / tau;
    let binormal1_s = normal_ss / tau - normal_s * (tau_s / (tau * tau));

    let tangent = jet.d1;
    let cross = pg_cross(tangent, normal, binormal1);
    let det = det4([tangent, normal, binormal1, cross]);
    if det.abs() < FRAME_TOL {
        return Err(Error::LightlikeDegeneracy {
            index,
            s,
            what: format!("frame is singular (det = {det:e})"),
        });
    }
    Ok(RawFrame {
        tangent,
        normal,
        binormal1,
        binormal1_s,
        cross,
        kappa,
        tau,
        eps1,
        eps2,
        orientation: sign(det),
    })
}

fn finish(raw: &RawFrame, mu: f64, jet: &CurveJet, s: f64) -> FramePoint {
    let binormal2 = raw.cross * mu;
    FramePoint {
        s,
        position: jet.position,
        tangent: raw.tangent,
        normal: raw.normal,
        binormal1: raw.binormal1,
        binormal2,
        kappa: raw.kappa,
        tau: raw.tau,
        sigma: pg_dot(raw.binormal1_s, binormal2),
    }
}

/// Full frame at a single parameter value; `μ` is fixed locally.
pub fn frame_at(curve: &AdmissibleCurve, s: f64) -> Result<FramePoint> {
    frame_from_jet(&curve.jet_at(s)?, s)
}

/// Frame of a single jet, labelled with parameter `s`.
pub fn frame_from_jet(jet: &CurveJet, s: f64) -> Result<FramePoint> {
    let raw = raw_frame(jet, None, s)?;
    Ok(finish(&raw, raw.orientation, jet, s))
}

pub fn tangent(curve: &AdmissibleCurve, s: f64) -> Result<PgVec4> {
    Ok(curve.jet_at(s)?.d1)
}

pub fn curvature_kappa(curve: &AdmissibleCurve, s: f64) -> Result<f64> {
    Ok(curvature_of(&curve.jet_at(s)?))
}

pub fn principal_normal(curve: &AdmissibleCurve, s: f64) -> Result<PgVec4> {
    let jet = curve.jet_at(s)?;
    let kappa = curvature_of(&jet);
    if kappa <= KAPPA_MIN {
        return raw_frame(&jet, None, s).map(|r| r.normal);
    }
    Ok(jet.d2 / kappa)
}

pub fn torsion_tau(curve: &AdmissibleCurve, s: f64) -> Result<f64> {
    let jet = curve.jet_at(s)?;
    match raw_frame(&jet, None, s) {
        Ok(r) => Ok(r.tau),
        Err(Error::FrenetDegenerate {
            quantity: "tau", ..
        }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

pub fn binormal1(curve: &AdmissibleCurve, s: f64) -> Result<PgVec4> {
    Ok(frame_at(curve, s)?.binormal1)
}

/// `μ · (T ∧ N ∧ B₁)` with `μ` chosen so that `det[T, N, B₁, B₂] = +1`.
pub fn binormal2(tangent: PgVec4, normal: PgVec4, binormal1: PgVec4) -> PgVec4 {
    let c = pg_cross(tangent, normal, binormal1);
    c * sign(det4([tangent, normal, binormal1, c]))
}

pub fn third_curvature_sigma(curve: &AdmissibleCurve, s: f64) -> Result<f64> {
    Ok(frame_at(curve, s)?.sigma)
}

/// Frame derivative matrix with rows for `T', N', B₁', B₂'`:
///
/// ```text
/// [ 0     ε₁κ    0     0   ]
/// [ 0     0      ε₂τ   0   ]
/// [ 0    -ε₂τ    0     ε₃σ ]
/// [ 0     0     -ε₂σ   0   ]
/// ```
pub fn frenet_matrix(signs: &Signs, kappa: f64, tau: f64, sigma: f64) -> Mat4 {
    let (e1, e2, e3) = (signs.eps1, signs.eps2, signs.eps3);
    let mut m = Mat4::zeros();
    m[(0, 1)] = e1 * kappa;
    m[(1, 2)] = e2 * tau;
    m[(2, 1)] = -e2 * tau;
    m[(2, 3)] = e3 * sigma;
    m[(3, 2)] = -e2 * sigma;
    m
}

/// Per-grid-point Frenet apparatus with globally fixed signs.
#[derive(Clone, Debug, Serialize)]
pub struct FrenetApparatus {
    pub signs: Signs,
    pub h: f64,
    pub points: Vec<FramePoint>,
}

/// Names of the four frame-derivative rows, in matrix order.
pub const FRENET_ROWS: [&str; 4] = ["tangent", "normal", "binormal1", "binormal2"];

impl FrenetApparatus {
    /// Builds the apparatus from jets on a uniform grid. Signs and `μ` are
    /// read at the middle node and must hold at every node.
    pub fn from_jets(jets: &[CurveJet], grid: &Grid) -> Result<Self> {
        if jets.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "{} jets for a grid of {} nodes",
                jets.len(),
                grid.n
            )));
        }
        let raws = jets
            .iter()
            .enumerate()
            .map(|(i, j)| raw_frame(j, Some(i), grid.at(i)))
            .collect::<Result<Vec<_>>>()?;
        let mid = grid.n / 2;
        let (eps1, eps2, mu) = (raws[mid].eps1, raws[mid].eps2, raws[mid].orientation);
        for (i, r) in raws.iter().enumerate() {
            let flip = if r.eps1 != eps1 {
                Some("principal normal changes causal type")
            } else if r.eps2 != eps2 {
                Some("first binormal changes causal type")
            } else if r.orientation != mu {
                Some("frame orientation flips")
            } else {
                None
            };
            if let Some(what) = flip {
                return Err(Error::LightlikeDegeneracy {
                    index: Some(i),
                    s: grid.at(i),
                    what: what.to_string(),
                });
            }
        }

        let points: Vec<FramePoint> = raws
            .iter()
            .zip(jets)
            .enumerate()
            .map(|(i, (r, j))| finish(r, mu, j, grid.at(i)))
            .collect();
        let b2 = points[mid].binormal2;
        let b2_sq = pg_dot(b2, b2);
        let eps3 = sign(b2_sq);
        if (b2_sq.abs() - 1.0).abs() > FRAME_TOL || eps3 != Signs::eps3_rule(eps1, eps2) {
            return Err(Error::LightlikeDegeneracy {
                index: Some(mid),
                s: grid.at(mid),
                what: format!("second binormal has <B₂,B₂> = {b2_sq}"),
            });
        }
        Ok(Self {
            signs: Signs {
                eps1,
                eps2,
                eps3,
                mu,
            },
            h: grid.h,
            points,
        })
    }

    pub fn compute(curve: &AdmissibleCurve) -> Result<Self> {
        Self::from_jets(&curve.jets()?, &curve.grid)
    }

    pub fn grid(&self) -> Grid {
        Grid {
            s0: self.points.first().map_or(0.0, |p| p.s),
            h: self.h,
            n: self.points.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kappa).collect()
    }

    pub fn tau(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.tau).collect()
    }

    pub fn sigma(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    /// Largest deviation of the pg-Gram matrix from `diag(1, ε₁, ε₂, ε₃)`
    /// at node `i`.
    pub fn gram_deviation(&self, i: usize) -> f64 {
        let f = self.points[i].frame();
        let g = self.signs.gram();
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { g[a] } else { 0.0 };
                worst = worst.max((pg_dot(f[a], f[b]) - want).abs());
            }
        }
        worst
    }

    pub fn max_gram_deviation(&self) -> f64 {
        (0..self.len())
            .map(|i| self.gram_deviation(i))
            .fold(0.0, f64::max)
    }

    pub fn determinant(&self, i: usize) -> f64 {
        det4(self.points[i].frame())
    }

    /// Residuals of the four frame-derivative rows at interior nodes.
    ///
    /// Derivatives of the frame are 3-point central differences; the
    /// right-hand side is [`frenet_matrix`] applied to the frame. Entry `r`
    /// holds the component-wise max-abs residual of row `r` per interior
    /// node `1..n-1`.
    pub fn row_residuals(&self) -> [Vec<f64>; 4] {
        let n = self.len();
        let mut out: [Vec<f64>; 4] = Default::default();
        for i in 1..n.saturating_sub(1) {
            let p = &self.points[i];
            let m = frenet_matrix(&self.signs, p.kappa, p.tau, p.sigma);
            let frame = p.frame();
            let ahead = self.points[i + 1].frame();
            let behind = self.points[i - 1].frame();
            for (r, slot) in out.iter_mut().enumerate() {
                let fd = (ahead[r] - behind[r]) / (2.0 * self.h);
                let mut rhs = PgVec4::ZERO;
                for (c, v) in frame.iter().enumerate() {
                    rhs = rhs + *v * m[(r, c)];
                }
                slot.push((fd - rhs).max_abs());
            }
        }
        out
    }

    /// Max-abs residual per frame-derivative row.
    pub fn max_row_residuals(&self) -> [f64; 4] {
        self.row_residuals()
            .map(|v| v.iter().copied().fold(0.0, f64::max))
    }
}

pub fn frenet_apparatus(curve: &AdmissibleCurve) -> Result<FrenetApparatus> {
    FrenetApparatus::compute(curve)
}
