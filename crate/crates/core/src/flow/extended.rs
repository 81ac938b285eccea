//! Time-direction analogue of the Frenet equations and its integration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::evolve::History;
use crate::flow::field::FlowField;
use crate::frenet::{FrenetApparatus, Signs};
use crate::numerics::{diff, Mat4};
use crate::vector::{pg_dot, PgVec4};

/// Default bound on the frame Gram deviation during [`frame_evolve`].
pub const GRAM_BOUND: f64 = 1e-6;

/// Coefficients `ξ₁..ξ₃` (tangent row) and `Γ₁..Γ₃` (frame rotation).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ExtendedCoeffs {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl ExtendedCoeffs {
    pub fn from_parts(xi: [f64; 3], gamma: [f64; 3]) -> Self {
        Self {
            xi1: xi[0],
            xi2: xi[1],
            xi3: xi[2],
            gamma1: gamma[0],
            gamma2: gamma[1],
            gamma3: gamma[2],
        }
    }

    fn lerp4(v: [&Self; 4], w: [f64; 4]) -> Self {
        let mix = |f: fn(&Self) -> f64| v.iter().zip(w).map(|(c, wi)| f(c) * wi).sum();
        Self {
            xi1: mix(|c| c.xi1),
            xi2: mix(|c| c.xi2),
            xi3: mix(|c| c.xi3),
            gamma1: mix(|c| c.gamma1),
            gamma2: mix(|c| c.gamma2),
            gamma3: mix(|c| c.gamma3),
        }
    }
}

/// `ξ` at one point from curvatures, flow components `f` and their
/// s-derivatives `f_s`.
pub fn xi_point(
    signs: &Signs,
    kappa: f64,
    tau: f64,
    sigma: f64,
    f: [f64; 4],
    f_s: [f64; 4],
) -> [f64; 3] {
    let (e1, e2, e3) = (signs.eps1, signs.eps2, signs.eps3);
    [
        e1 * kappa * f[0] + f_s[1] - e1 * tau * f[2],
        e2 * tau * f[1] + f_s[2] - e2 * sigma * f[3],
        f_s[3] + e3 * sigma * f[2],
    ]
}

/// Flow components sampled on the apparatus grid and their s-derivatives.
pub(crate) fn sampled_flow(
    ap: &FrenetApparatus,
    flow: &FlowField,
    t: f64,
) -> Result<([Vec<f64>; 4], [Vec<f64>; 4])> {
    let s0 = ap.points.first().map(|p| p.s).unwrap_or(0.0);
    let n = ap.len();
    let f = [0, 1, 2, 3].map(|k| flow.sample(k, s0, ap.h, n, t));
    let mut f_s: [Vec<f64>; 4] = Default::default();
    for k in 0..4 {
        f_s[k] = diff(&f[k], ap.h, 1, 4)?;
    }
    Ok((f, f_s))
}

/// `ξ₁, ξ₂, ξ₃` at every node of `ap` at time `t`.
pub fn xi_coeffs(ap: &FrenetApparatus, flow: &FlowField, t: f64) -> Result<Vec<[f64; 3]>> {
    let (f, f_s) = sampled_flow(ap, flow, t)?;
    Ok(ap
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let fi = [f[0][i], f[1][i], f[2][i], f[3][i]];
            let fsi = [f_s[0][i], f_s[1][i], f_s[2][i], f_s[3][i]];
            xi_point(&ap.signs, p.kappa, p.tau, p.sigma, fi, fsi)
        })
        .collect())
}

/// `Γ₁ = -<∂B₁/∂t, N>`, `Γ₂ = <∂B₂/∂t, N>`, `Γ₃ = <∂B₁/∂t, B₂>` per level
/// and node, with frame time derivatives by finite differences.
pub fn gamma_coeffs_numeric(history: &History) -> Result<Vec<Vec<[f64; 3]>>> {
    history.require(3)?;
    let n = history.grid.n;
    (0..history.len())
        .map(|j| {
            (0..n)
                .map(|i| {
                    let b1_t =
                        history.time_derivative(j, |l| history.levels[l].points[i].binormal1)?;
                    let b2_t =
                        history.time_derivative(j, |l| history.levels[l].points[i].binormal2)?;
                    let p = &history.levels[j].points[i];
                    Ok([
                        -pg_dot(b1_t, p.normal),
                        pg_dot(b2_t, p.normal),
                        pg_dot(b1_t, p.binormal2),
                    ])
                })
                .collect()
        })
        .collect()
}

/// `ξ` and `Γ` for every level and node of a history.
pub fn extended_coeffs(history: &History, flow: &FlowField) -> Result<Vec<Vec<ExtendedCoeffs>>> {
    let gammas = gamma_coeffs_numeric(history)?;
    history
        .levels
        .iter()
        .zip(gammas)
        .enumerate()
        .map(|(j, (ap, g))| {
            let xi = xi_coeffs(ap, flow, history.time(j))?;
            Ok(xi
                .into_iter()
                .zip(g)
                .map(|(x, g)| ExtendedCoeffs::from_parts(x, g))
                .collect())
        })
        .collect()
}

/// Frame time-derivative matrix, rows for `∂T/∂t, ∂N/∂t, ∂B₁/∂t, ∂B₂/∂t`:
///
/// ```text
/// [  0       ξ₁      ξ₂      ξ₃   ]
/// [ -ε₁ξ₁    0       Γ₁ε₂    Γ₂ε₃ ]
/// [ -ε₂ξ₂   -Γ₁ε₁    0       Γ₃ε₃ ]
/// [ -ε₃ξ₃   -Γ₂ε₁   -Γ₃ε₂    0    ]
/// ```
pub fn extended_frenet_matrix(c: &ExtendedCoeffs, signs: &Signs) -> Mat4 {
    let (e1, e2, e3) = (signs.eps1, signs.eps2, signs.eps3);
    Mat4::new(
        0.0,
        c.xi1,
        c.xi2,
        c.xi3,
        -e1 * c.xi1,
        0.0,
        c.gamma1 * e2,
        c.gamma2 * e3,
        -e2 * c.xi2,
        -c.gamma1 * e1,
        0.0,
        c.gamma3 * e3,
        -e3 * c.xi3,
        -c.gamma2 * e1,
        -c.gamma3 * e2,
        0.0,
    )
}

/// `max |MG + (MG)ᵀ|` with `G = diag(1, ε₁, ε₂, ε₃)`.
pub fn skew_defect(m: &Mat4, signs: &Signs) -> f64 {
    let g = Mat4::from_diagonal(&signs.gram().into());
    let mg = m * g;
    (mg + mg.transpose()).amax()
}

/// Coefficients as a function of time.
pub trait CoeffSource {
    fn coeffs_at(&self, t: f64) -> ExtendedCoeffs;
}

impl<F: Fn(f64) -> ExtendedCoeffs> CoeffSource for F {
    fn coeffs_at(&self, t: f64) -> ExtendedCoeffs {
        self(t)
    }
}

/// Coefficients sampled at `t0 + j dt`, interpolated with cubic Lagrange
/// polynomials over the four nearest samples.
#[derive(Clone, Debug)]
pub struct CoeffSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<ExtendedCoeffs>,
}

impl CoeffSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<ExtendedCoeffs>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InsufficientHistory {
                needed: 4,
                got: values.len(),
            });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "time step {dt} must be positive"
            )));
        }
        Ok(Self { t0, dt, values })
    }

    /// Series at node `i` of a coefficient table indexed `[level][node]`.
    pub fn at_node(history: &History, table: &[Vec<ExtendedCoeffs>], i: usize) -> Result<Self> {
        Self::new(
            history.t0,
            history.dt,
            table.iter().map(|lvl| lvl[i]).collect(),
        )
    }
}

impl CoeffSource for CoeffSeries {
    fn coeffs_at(&self, t: f64) -> ExtendedCoeffs {
        let n = self.values.len();
        let x = (t - self.t0) / self.dt;
        let start = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let nodes = [0, 1, 2, 3].map(|k| (start + k) as f64);
        let mut w = [1.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    w[a] *= (x - nodes[b]) / (nodes[a] - nodes[b]);
                }
            }
        }
        ExtendedCoeffs::lerp4([0, 1, 2, 3].map(|k| &self.values[start + k]), w)
    }
}

/// Frames produced by [`frame_evolve`].
#[derive(Clone, Debug, Serialize)]
pub struct FrameSeries {
    pub times: Vec<f64>,
    pub frames: Vec<[PgVec4; 4]>,
    /// Deviation of `C G Cᵀ` from `G` at each stored time.
    pub gram_deviation: Vec<f64>,
}

fn frame_rows(frame: &[PgVec4; 4]) -> Mat4 {
    let r = frame.map(|v| v.to_array());
    Mat4::from_fn(|i, j| r[i][j])
}

/// Integrates `d/dt [T N B₁ B₂]ᵀ = M(t) [T N B₁ B₂]ᵀ` with RK4.
///
/// The frame is carried as `F(t) = C(t) F₀` with `C(0) = I`. Every assembled
/// `M` is checked for ε-weighted skew-symmetry, and the Gram matrix of the
/// frame-adapted metric, `C G Cᵀ`, must stay within `bound` of `G`.
pub fn frame_evolve(
    frame0: [PgVec4; 4],
    signs: &Signs,
    source: &dyn CoeffSource,
    t0: f64,
    dt: f64,
    steps: usize,
    bound: f64,
) -> Result<FrameSeries> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "time step {dt} must be positive"
        )));
    }
    let g = Mat4::from_diagonal(&signs.gram().into());
    let f0 = frame_rows(&frame0);
    let matrix = |t: f64| -> Result<Mat4> {
        let m = extended_frenet_matrix(&source.coeffs_at(t), signs);
        let defect = skew_defect(&m, signs);
        if defect != 0.0 {
            return Err(Error::InvalidInput(format!(
                "coefficient matrix at t = {t} is not ε-skew (defect {defect:e})"
            )));
        }
        Ok(m)
    };
    let to_frame = |c: &Mat4| {
        let f = c * f0;
        [0, 1, 2, 3].map(|r| PgVec4::new(f[(r, 0)], f[(r, 1)], f[(r, 2)], f[(r, 3)]))
    };

    let mut c = Mat4::identity();
    let mut out = FrameSeries {
        times: vec![t0],
        frames: vec![frame0],
        gram_deviation: vec![0.0],
    };
    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * dt;
        let (m0, mh, m1) = (matrix(t)?, matrix(t + dt / 2.0)?, matrix(t + dt)?);
        let k1 = m0 * c;
        let k2 = mh * (c + k1 * (dt / 2.0));
        let k3 = mh * (c + k2 * (dt / 2.0));
        let k4 = m1 * (c + k3 * dt);
        c += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let deviation = (c * g * c.transpose() - g).amax();
        if !(deviation <= bound) {
            return Err(Error::GramDrift {
                step,
                deviation,
                bound,
            });
        }
        out.times.push(t0 + step as f64 * dt);
        out.frames.push(to_frame(&c));
        out.gram_deviation.push(deviation);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm4;

    const HELIX: Signs = Signs {
        eps1: 1.0,
        eps2: 1.0,
        eps3: -1.0,
        mu: 1.0,
    };

    #[test]
    fn xi_for_tangential_and_binormal_flows() {
        // κ = 2, τ = 3, σ = 0
        let xi = xi_point(&HELIX, 2.0, 3.0, 0.0, [1.5, 0.0, 0.0, 0.0], [0.0; 4]);
        assert_eq!(xi, [3.0, 0.0, 0.0]);
        let xi = xi_point(&HELIX, 2.0, 3.0, 0.0, [0.0, 0.0, 0.7, 0.0], [0.0; 4]);
        assert!((xi[0] + 2.1).abs() < 1e-15);
        assert_eq!((xi[1], xi[2]), (0.0, 0.0));
        assert_eq!(
            xi_point(&HELIX, 2.0, 3.0, 0.4, [0.0; 4], [0.0; 4]),
            [0.0; 3]
        );
    }

    #[test]
    fn matrix_layout_and_skew() {
        assert_eq!(
            extended_frenet_matrix(&ExtendedCoeffs::default(), &HELIX),
            Mat4::zeros()
        );
        let m = extended_frenet_matrix(
            &ExtendedCoeffs {
                xi1: 1.0,
                ..Default::default()
            },
            &HELIX,
        );
        let mut want = Mat4::zeros();
        want[(0, 1)] = 1.0;
        want[(1, 0)] = -1.0;
        assert_eq!(m, want);

        for signs in [
            HELIX,
            Signs::from_pair(-1.0, 1.0),
            Signs::from_pair(1.0, -1.0),
        ] {
            let c = ExtendedCoeffs {
                xi1: 0.3,
                xi2: -1.2,
                xi3: 2.5,
                gamma1: 0.7,
                gamma2: -0.4,
                gamma3: 1.1,
            };
            assert_eq!(
                skew_defect(&extended_frenet_matrix(&c, &signs), &signs),
                0.0
            );
        }
    }

    #[test]
    fn series_interpolates_cubics_exactly() {
        let vals: Vec<ExtendedCoeffs> = (0..8)
            .map(|j| {
                let t = 0.1 * j as f64;
                ExtendedCoeffs {
                    gamma1: t * t * t - t,
                    ..Default::default()
                }
            })
            .collect();
        let s = CoeffSeries::new(0.0, 0.1, vals).unwrap();
        for t in [0.0, 0.05, 0.33, 0.61, 0.7] {
            assert!((s.coeffs_at(t).gamma1 - (t * t * t - t)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_coefficients_match_exponential() {
        let c = ExtendedCoeffs {
            xi1: 0.5,
            xi2: 0.0,
            xi3: 0.2,
            gamma1: 1.0,
            gamma2: 0.3,
            gamma3: -0.6,
        };
        let f0 = [
            PgVec4::new(1.0, 1.0, 0.0, 1.0),
            PgVec4::new(0.0, 0.0, -1.0, 0.0),
            PgVec4::new(0.0, 0.0, 0.0, -1.0),
            PgVec4::new(0.0, 1.0, 0.0, 0.0),
        ];
        let series = frame_evolve(f0, &HELIX, &|_t: f64| c, 0.0, 1e-2, 100, GRAM_BOUND).unwrap();
        let m = extended_frenet_matrix(&c, &HELIX);
        let e = expm4(&m, 1.0).unwrap() * frame_rows(&f0);
        let last = series.frames.last().unwrap();
        for r in 0..4 {
            for k in 0..4 {
                assert!((last[r][k] - e[(r, k)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_coefficients_keep_frames() {
        let f0 = [
            PgVec4::new(1.0, 0.0, 0.0, 0.0),
            PgVec4::new(0.0, 0.0, 1.0, 0.0),
            PgVec4::new(0.0, 0.0, 0.0, 1.0),
            PgVec4::new(0.0, 1.0, 0.0, 0.0),
        ];
        let s = frame_evolve(
            f0,
            &HELIX,
            &|_t: f64| ExtendedCoeffs::default(),
            0.0,
            0.1,
            10,
            GRAM_BOUND,
        )
        .unwrap();
        assert!(s.frames.iter().all(|f| *f == f0));
    }

    #[test]
    fn drift_bound_is_enforced() {
        let f0 = [PgVec4::ZERO; 4];
        let c = ExtendedCoeffs {
            gamma1: 5.0,
            ..Default::default()
        };
        let err = frame_evolve(f0, &HELIX, &|_t: f64| c, 0.0, 0.5, 10, 1e-6).unwrap_err();
        assert!(matches!(err, Error::GramDrift { step: 1, .. }));
    }
}
