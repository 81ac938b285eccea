//! Numerical residuals of the compatibility conditions between the s- and
//! t-derivatives of the moving frame.
//!
//! Each identity is evaluated at every stored time level and grid node.
//! s-derivatives use fourth-order stencils, t-derivatives the second-order
//! differences of [`History::time_derivative`]. Identities stated as
//! integrals are checked with the integration constant removed by
//! subtracting the value at the first node (s-integrals) or first level
//! (t-integrals).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::evolve::{time_derivative, History};
use crate::flow::extended::{
    extended_coeffs, extended_frenet_matrix, gamma_coeffs_numeric, sampled_flow, skew_defect,
    xi_point,
};
use crate::flow::field::FlowField;
use crate::frenet::FRENET_ROWS;
use crate::numerics::{cumulative_simpson, diff, observed_order_with_floor};

/// Points closer than this to the pole `τ = ε₁` are skipped.
pub const POLE_GAP: f64 = 1e-6;

/// Residual statistics for one identity.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub identity: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub h: f64,
    pub dt: f64,
    /// Points left out of the statistics (pole proximity or a sign
    /// condition that switches the identity off).
    pub skipped: usize,
    /// Values by `[level * nodes + node]`, NaN where skipped.
    #[serde(skip)]
    pub values: Vec<f64>,
    #[serde(skip)]
    pub nodes: usize,
}

impl ResidualEntry {
    pub fn new(identity: String, values: Vec<f64>, nodes: usize, h: f64, dt: f64) -> Self {
        let used: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        let skipped = values.len() - used.len();
        let max_abs = used.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean_abs = if used.is_empty() {
            0.0
        } else {
            used.iter().map(|v| v.abs()).sum::<f64>() / used.len() as f64
        };
        Self {
            identity,
            max_abs,
            mean_abs,
            h,
            dt,
            skipped,
            values,
            nodes,
        }
    }

    pub fn value(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.nodes + node]
    }

    pub fn levels(&self) -> usize {
        if self.nodes == 0 {
            0
        } else {
            self.values.len() / self.nodes
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn get(&self, identity: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.identity == identity)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs).fold(0.0, f64::max)
    }
}

type Table = Vec<Vec<f64>>;

fn s_deriv(t: &Table, h: f64) -> Result<Table> {
    t.iter().map(|row| diff(row, h, 1, 4)).collect()
}

fn t_deriv(t: &Table, dt: f64) -> Table {
    let levels = t.len();
    (0..levels)
        .map(|j| {
            (0..t[0].len())
                .map(|i| time_derivative(levels, j, dt, |l| t[l][i]))
                .collect()
        })
        .collect()
}

/// Integral over time from the first level, per node.
fn t_integral(t: &Table, dt: f64) -> Result<Table> {
    let (levels, n) = (t.len(), t[0].len());
    let mut out = vec![vec![0.0; n]; levels];
    for i in 0..n {
        let col: Vec<f64> = (0..levels).map(|j| t[j][i]).collect();
        for (j, v) in cumulative_simpson(&col, dt)?.into_iter().enumerate() {
            out[j][i] = v;
        }
    }
    Ok(out)
}

fn s_integral(t: &Table, h: f64) -> Result<Table> {
    t.iter().map(|row| cumulative_simpson(row, h)).collect()
}

/// Every field the compatibility identities are built from, tabulated as
/// `[level][node]`.
pub struct CompatibilityFields {
    pub h: f64,
    pub dt: f64,
    pub eps: [f64; 3],
    pub kappa: Table,
    pub tau: Table,
    pub sigma: Table,
    pub kappa_s: Table,
    pub tau_s: Table,
    pub sigma_s: Table,
    pub kappa_t: Table,
    pub tau_t: Table,
    pub sigma_t: Table,
    /// `f[k]`, `f_s[k]`, `f_ss[k]` for component `k`.
    pub f: [Table; 4],
    pub f_s: [Table; 4],
    pub f_ss: [Table; 4],
    pub xi: [Table; 3],
    pub xi_s: [Table; 3],
    pub gamma: [Table; 3],
    pub gamma_s: [Table; 3],
}

impl CompatibilityFields {
    pub fn new(history: &History, flow: &FlowField) -> Result<Self> {
        history.require(3)?;
        let (h, dt) = (history.grid.h, history.dt);
        let signs = history.signs;
        let levels = history.len();
        let n = history.grid.n;
        let per_level = |f: &dyn Fn(&crate::frenet::FramePoint) -> f64| -> Table {
            history
                .levels
                .iter()
                .map(|ap| ap.points.iter().map(f).collect())
                .collect()
        };
        let kappa = per_level(&|p| p.kappa);
        let tau = per_level(&|p| p.tau);
        let sigma = per_level(&|p| p.sigma);

        let mut f: [Table; 4] = Default::default();
        let mut f_s: [Table; 4] = Default::default();
        for (j, ap) in history.levels.iter().enumerate() {
            let (fv, fs) = sampled_flow(ap, flow, history.time(j))?;
            for k in 0..4 {
                f[k].push(fv[k].clone());
                f_s[k].push(fs[k].clone());
            }
        }
        let mut f_ss: [Table; 4] = Default::default();
        for k in 0..4 {
            f_ss[k] = s_deriv(&f_s[k], h)?;
        }

        let mut xi: [Table; 3] = [
            vec![vec![0.0; n]; levels],
            vec![vec![0.0; n]; levels],
            vec![vec![0.0; n]; levels],
        ];
        for j in 0..levels {
            for i in 0..n {
                let fi = [f[0][j][i], f[1][j][i], f[2][j][i], f[3][j][i]];
                let fsi = [f_s[0][j][i], f_s[1][j][i], f_s[2][j][i], f_s[3][j][i]];
                let x = xi_point(&signs, kappa[j][i], tau[j][i], sigma[j][i], fi, fsi);
                for k in 0..3 {
                    xi[k][j][i] = x[k];
                }
            }
        }
        let g = gamma_coeffs_numeric(history)?;
        let gamma: [Table; 3] = [0, 1, 2].map(|k| {
            g.iter()
                .map(|lvl| lvl.iter().map(|c| c[k]).collect())
                .collect()
        });

        Ok(Self {
            h,
            dt,
            eps: [signs.eps1, signs.eps2, signs.eps3],
            kappa_s: s_deriv(&kappa, h)?,
            tau_s: s_deriv(&tau, h)?,
            sigma_s: s_deriv(&sigma, h)?,
            kappa_t: t_deriv(&kappa, dt),
            tau_t: t_deriv(&tau, dt),
            sigma_t: t_deriv(&sigma, dt),
            xi_s: [
                s_deriv(&xi[0], h)?,
                s_deriv(&xi[1], h)?,
                s_deriv(&xi[2], h)?,
            ],
            gamma_s: [
                s_deriv(&gamma[0], h)?,
                s_deriv(&gamma[1], h)?,
                s_deriv(&gamma[2], h)?,
            ],
            kappa,
            tau,
            sigma,
            f,
            f_s,
            f_ss,
            xi,
            gamma,
        })
    }

    fn levels(&self) -> usize {
        self.kappa.len()
    }

    fn nodes(&self) -> usize {
        self.kappa[0].len()
    }

    fn entry(&self, name: &str, r: impl Fn(usize, usize) -> Option<f64>) -> ResidualEntry {
        let (levels, n) = (self.levels(), self.nodes());
        let mut values = Vec::with_capacity(levels * n);
        for j in 0..levels {
            for i in 0..n {
                values.push(r(j, i).unwrap_or(f64::NAN));
            }
        }
        ResidualEntry::new(name.to_string(), values, n, self.h, self.dt)
    }

    fn table(&self, r: impl Fn(usize, usize) -> f64) -> Table {
        (0..self.levels())
            .map(|j| (0..self.nodes()).map(|i| r(j, i)).collect())
            .collect()
    }

    /// `θ = -τf₂ - ε₂f₃' + σf₄`.
    fn theta(&self, j: usize, i: usize) -> f64 {
        let e2 = self.eps[1];
        -self.tau[j][i] * self.f[1][j][i] - e2 * self.f_s[2][j][i]
            + self.sigma[j][i] * self.f[3][j][i]
    }

    /// `φ = -κf₁ - ε₁f₂' + τf₃`.
    fn phi(&self, j: usize, i: usize) -> f64 {
        let e1 = self.eps[0];
        -self.kappa[j][i] * self.f[0][j][i] - e1 * self.f_s[1][j][i]
            + self.tau[j][i] * self.f[2][j][i]
    }

    /// `M = -ε₃f₄' + σf₃`.
    fn m_term(&self, j: usize, i: usize) -> f64 {
        -self.eps[2] * self.f_s[3][j][i] + self.sigma[j][i] * self.f[2][j][i]
    }

    /// Conditions from commuting the s- and t-derivatives of `T`.
    pub fn tangent_system(&self) -> Result<Vec<ResidualEntry>> {
        let [e1, e2, e3] = self.eps;
        let (k, t, sg) = (&self.kappa, &self.tau, &self.sigma);
        let (f, fs, fss) = (&self.f, &self.f_s, &self.f_ss);
        let (xi, xis) = (&self.xi, &self.xi_s);
        let g = &self.gamma;

        let mut out = vec![
            self.entry("tangent.kappa_evolution", |j, i| {
                Some(e1 * self.kappa_t[j][i] - (xis[0][j][i] - e1 * xi[1][j][i] * t[j][i]))
            }),
            self.entry("tangent.t_component", |j, i| {
                Some(k[j][i] * (-k[j][i] * f[0][j][i] - e1 * fs[1][j][i] + t[j][i] * f[2][j][i]))
            }),
            self.entry("tangent.b1_component", |j, i| {
                Some(
                    e1 * e2 * k[j][i] * g[0][j][i]
                        - (xis[1][j][i] + e2 * xi[0][j][i] * t[j][i] - e2 * xi[2][j][i] * sg[j][i]),
                )
            }),
            self.entry("tangent.b2_component", |j, i| {
                let s = sg[j][i];
                Some(
                    self.sigma_s[j][i] * f[2][j][i]
                        + (e2 * t[j][i] * f[1][j][i] + 2.0 * fs[2][j][i]) * s
                        - (e1 * k[j][i] * g[1][j][i] + e1 * s * s * f[3][j][i] - e3 * fss[3][j][i]),
                )
            }),
            self.entry("tangent.gamma1_compact", |j, i| {
                Some(
                    g[0][j][i]
                        - (e1 * e2 * xis[1][j][i] + e1 * xi[0][j][i] * t[j][i]
                            - e1 * xi[2][j][i] * sg[j][i])
                            / k[j][i],
                )
            }),
            self.entry("tangent.gamma1_expanded", |j, i| {
                let (kk, tt, s) = (k[j][i], t[j][i], sg[j][i]);
                let bracket = e1 * self.tau_s[j][i] * f[1][j][i]
                    + kk * tt * f[0][j][i]
                    + e1 * fs[1][j][i] * tt * (1.0 + e2)
                    - e1 * f[2][j][i] * (tt * tt * e2 + s * s * e3)
                    - e1 * s * fs[3][j][i] * (e2 * e3 + 1.0)
                    + e2 * e1 * (fss[2][j][i] - e3 * self.sigma_s[j][i] * f[3][j][i]);
                Some(g[0][j][i] - bracket / kk)
            }),
            self.entry("tangent.gamma2_compact", |j, i| {
                Some(g[1][j][i] - (e1 * e3 * xis[2][j][i] + e1 * xi[1][j][i] * sg[j][i]) / k[j][i])
            }),
        ];
        let rate = self.table(|j, i| e1 * xis[0][j][i] - xi[1][j][i] * t[j][i]);
        let integral = t_integral(&rate, self.dt)?;
        out.push(self.entry("tangent.kappa_integral", |j, i| {
            Some(k[j][i] - k[0][i] - integral[j][i])
        }));
        Ok(out)
    }

    /// Conditions from commuting the s- and t-derivatives of `N`.
    pub fn normal_system(&self) -> Result<Vec<ResidualEntry>> {
        let [e1, e2, e3] = self.eps;
        let (k, t, sg) = (&self.kappa, &self.tau, &self.sigma);
        let (f, fs, fss) = (&self.f, &self.f_s, &self.f_ss);
        let (xi, xis) = (&self.xi, &self.xi_s);
        let (g, gs) = (&self.gamma, &self.gamma_s);

        let mut out = vec![
            self.entry("normal.t_component", |j, i| {
                Some(-xis[0][j][i] - e2 * t[j][i] * self.theta(j, i))
            }),
            self.entry("normal.n_component", |j, i| {
                Some(
                    -e1 * g[0][j][i]
                        - (xi[0][j][i] * e1 * k[j][i] - e2 * e1 * t[j][i] * g[0][j][i]),
                )
            }),
            self.entry("normal.b1_component", |j, i| {
                Some(gs[0][j][i] * e2 - e3 * e2 * g[1][j][i] * sg[j][i] - e2 * self.tau_t[j][i])
            }),
            self.entry("normal.b2_component", |j, i| {
                Some(g[0][j][i] * e3 * e2 * sg[j][i] + gs[1][j][i] * e3 - e3 * g[2][j][i])
            }),
            self.entry("normal.tau_evolution", |j, i| {
                Some(self.tau_t[j][i] - (gs[0][j][i] - e3 * g[1][j][i] * sg[j][i]))
            }),
            self.entry("normal.sigma_product", |j, i| {
                Some(g[0][j][i] * e2 * sg[j][i] + gs[1][j][i] + g[2][j][i])
            }),
            self.entry("normal.flow_constraint", |j, i| {
                let (kk, tt) = (k[j][i], t[j][i]);
                Some(
                    e1 * fss[1][j][i] - kk * fs[0][j][i] + 2.0 * tt * fs[2][j][i]
                        - self.kappa_s[j][i] * f[0][j][i]
                        + self.tau_s[j][i] * f[2][j][i]
                        + e2 * tt * tt * f[1][j][i]
                        + sg[j][i] * tt * e2 * f[3][j][i],
                )
            }),
            self.entry("normal.gamma1_pole_form", |j, i| {
                let tt = t[j][i];
                if (tt - e1).abs() < POLE_GAP {
                    return None;
                }
                // ξ₁ in the local normalization κf₁ + ε₁f₂' - τf₃
                let xi_local = k[j][i] * f[0][j][i] + e1 * fs[1][j][i] - tt * f[2][j][i];
                Some(g[0][j][i] + e1 * k[j][i] * xi_local / (tt - e1))
            }),
            self.entry("normal.gamma_energy_derivative", |j, i| {
                let (g1, g2, g3) = (g[0][j][i], g[1][j][i], g[2][j][i]);
                let lhs = 2.0 * g1 * gs[0][j][i] + 2.0 * g2 * gs[1][j][i];
                Some(lhs - (2.0 * self.tau_t[j][i] * g1 - (e3 / e2) * g2 * g3))
            }),
        ];

        let square = self.table(|j, i| g[0][j][i].powi(2) + g[1][j][i].powi(2));
        let source = self.table(|j, i| {
            2.0 * self.tau_t[j][i] * g[0][j][i] - (e3 / e2) * g[1][j][i] * g[2][j][i]
        });
        let along_s = s_integral(&source, self.h)?;
        out.push(self.entry("normal.gamma_energy_integral", |j, i| {
            Some(square[j][i] - square[j][0] - along_s[j][i])
        }));

        let rate = self.table(|j, i| gs[0][j][i] - e3 * g[1][j][i] * sg[j][i]);
        let integral = t_integral(&rate, self.dt)?;
        out.push(self.entry("normal.tau_integral", |j, i| {
            Some(t[j][i] - t[0][i] - integral[j][i])
        }));
        Ok(out)
    }

    /// Conditions from commuting the s- and t-derivatives of `B₁`.
    pub fn binormal1_system(&self) -> Result<Vec<ResidualEntry>> {
        let [e1, e2, e3] = self.eps;
        let (k, t, sg) = (&self.kappa, &self.tau, &self.sigma);
        let (g, gs) = (&self.gamma, &self.gamma_s);

        let theta = self.table(|j, i| self.theta(j, i));
        let theta_s = s_deriv(&theta, self.h)?;
        let mut out = vec![
            self.entry("binormal1.t_component", |j, i| {
                Some(theta_s[j][i] - (e3 * sg[j][i] * theta[j][i] - e2 * t[j][i] * self.phi(j, i)))
            }),
            self.entry("binormal1.n_component", |j, i| {
                Some(
                    gs[0][j][i] * e1
                        + e1 * k[j][i] * theta[j][i]
                        + e1 * self.tau_t[j][i]
                        + e3 * e1 * g[0][j][i] * sg[j][i],
                )
            }),
            self.entry("binormal1.b1_component", |j, i| {
                Some(
                    e3 * self.sigma_t[j][i]
                        - (-e3 * e2 * sg[j][i] * g[2][j][i]
                            + (1.0 - e1 * e2) * t[j][i] * g[0][j][i]),
                )
            }),
            self.entry("binormal1.b2_component", |j, i| {
                Some(
                    e3 * gs[2][j][i]
                        - (e3 * e3 * sg[j][i] * g[2][j][i] - e3 * e2 * t[j][i] * g[1][j][i]),
                )
            }),
        ];

        let integral = t_integral(&g[2], self.dt)?;
        let active = e1 * e2 == 1.0;
        out.push(self.entry("binormal1.sigma_exponential", |j, i| {
            active.then(|| sg[j][i] - sg[0][i] * (-e2 * integral[j][i]).exp())
        }));
        Ok(out)
    }

    /// Conditions from commuting the s- and t-derivatives of `B₂`.
    pub fn binormal2_system(&self) -> Result<Vec<ResidualEntry>> {
        let [e1, e2, _] = self.eps;
        let (k, t, sg) = (&self.kappa, &self.tau, &self.sigma);
        let (g, gs) = (&self.gamma, &self.gamma_s);

        let m = self.table(|j, i| self.m_term(j, i));
        let m_s = s_deriv(&m, self.h)?;
        let mut out = vec![
            self.entry("binormal2.t_component", |j, i| {
                Some(m_s[j][i] + e2 * sg[j][i] * self.theta(j, i))
            }),
            self.entry("binormal2.n_component", |j, i| {
                Some(
                    m[j][i] * k[j][i] - gs[1][j][i] + e2 * t[j][i] * g[2][j][i]
                        - e2 * g[0][j][i] * sg[j][i],
                )
            }),
            self.entry("binormal2.b1_component", |j, i| {
                Some(self.sigma_t[j][i] - (gs[2][j][i] + e1 * t[j][i] * g[1][j][i]))
            }),
            self.entry("binormal2.gamma3_sigma", |j, i| Some(g[2][j][i] * sg[j][i])),
        ];

        let source = self.table(|j, i| sg[j][i] * self.theta(j, i));
        let along_s = s_integral(&source, self.h)?;
        out.push(self.entry("binormal2.m_integral", |j, i| {
            Some(m[j][i] - m[j][0] + e2 * along_s[j][i])
        }));

        let rate = self.table(|j, i| gs[2][j][i] + e1 * t[j][i] * g[1][j][i]);
        let integral = t_integral(&rate, self.dt)?;
        out.push(self.entry("binormal2.sigma_integral", |j, i| {
            Some(sg[j][i] - sg[0][i] - integral[j][i])
        }));
        Ok(out)
    }

    /// All four systems in order.
    pub fn report(&self) -> Result<ResidualReport> {
        let mut entries = self.tangent_system()?;
        entries.extend(self.normal_system()?);
        entries.extend(self.binormal1_system()?);
        entries.extend(self.binormal2_system()?);
        Ok(ResidualReport { entries })
    }
}

pub fn tangent_residuals(history: &History, flow: &FlowField) -> Result<Vec<ResidualEntry>> {
    CompatibilityFields::new(history, flow)?.tangent_system()
}

pub fn normal_residuals(history: &History, flow: &FlowField) -> Result<Vec<ResidualEntry>> {
    CompatibilityFields::new(history, flow)?.normal_system()
}

pub fn binormal1_residuals(history: &History, flow: &FlowField) -> Result<Vec<ResidualEntry>> {
    CompatibilityFields::new(history, flow)?.binormal1_system()
}

pub fn binormal2_residuals(history: &History, flow: &FlowField) -> Result<Vec<ResidualEntry>> {
    CompatibilityFields::new(history, flow)?.binormal2_system()
}

pub fn residual_report(history: &History, flow: &FlowField) -> Result<ResidualReport> {
    CompatibilityFields::new(history, flow)?.report()
}

/// Identities that vanish for every flow: the Gram deviation of the
/// computed frames and the skew defect of the assembled time matrices.
pub const STRUCTURAL_IDENTITIES: [&str; 2] = ["frenet.gram", "extended.skew"];

/// Frame-level checks on every stored level: Gram deviation, the four
/// Frenet-row residuals (central differences, end nodes skipped) and the
/// skew defect of the extended matrix.
pub fn structure_checks(history: &History, flow: &FlowField) -> Result<Vec<ResidualEntry>> {
    let (h, dt, n) = (history.grid.h, history.dt, history.grid.n);
    let mut gram = Vec::with_capacity(history.len() * n);
    let mut rows: [Vec<f64>; 4] = Default::default();
    for ap in &history.levels {
        gram.extend((0..n).map(|i| ap.gram_deviation(i)));
        for (r, v) in ap.row_residuals().into_iter().enumerate() {
            rows[r].push(f64::NAN);
            rows[r].extend(v);
            rows[r].push(f64::NAN);
        }
    }
    let mut out = vec![ResidualEntry::new("frenet.gram".into(), gram, n, h, dt)];
    for (r, v) in rows.into_iter().enumerate() {
        out.push(ResidualEntry::new(
            format!("frenet.row_{}", FRENET_ROWS[r]),
            v,
            n,
            h,
            dt,
        ));
    }
    let skew = extended_coeffs(history, flow)?
        .iter()
        .flat_map(|level| {
            level
                .iter()
                .map(|c| skew_defect(&extended_frenet_matrix(c, &history.signs), &history.signs))
        })
        .collect();
    out.push(ResidualEntry::new("extended.skew".into(), skew, n, h, dt));
    Ok(out)
}

/// Differences between refinement levels at or below this are treated as
/// round-off. Residuals are built from up to two finite-difference
/// quotients, so their noise sits well above machine epsilon.
pub const REFINEMENT_FLOOR: f64 = 1e-10;

/// Observed convergence of one identity under refinement.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceEntry {
    pub identity: String,
    /// `(h, max |R_l - R_{l+1}|)` over the points shared by all levels.
    pub differences: Vec<(f64, f64)>,
    /// `None` when the differences sit at the round-off floor throughout.
    pub order: Option<f64>,
    pub saturated: bool,
}

/// Compares reports computed on successively refined grids.
///
/// Level `l` must use `2^l` times the intervals of level 0 in both `s` and
/// `t` over the same domain and horizon. The discretization error of level
/// `l` is estimated by its difference from level `l + 1` at the nodes and
/// times of level 0.
pub fn refinement_orders(reports: &[ResidualReport], floor: f64) -> Result<Vec<ConvergenceEntry>> {
    if reports.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            got: reports.len(),
        });
    }
    let base = &reports[0];
    base.entries
        .iter()
        .map(|e0| {
            let (levels0, nodes0) = (e0.levels(), e0.nodes);
            let mut differences = Vec::new();
            for l in 0..reports.len() - 1 {
                let find = |r: &ResidualReport| {
                    r.get(&e0.identity).cloned().ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "{} missing from a refinement level",
                            e0.identity
                        ))
                    })
                };
                let (a, b) = (find(&reports[l])?, find(&reports[l + 1])?);
                let (sa, sb) = (1usize << l, 1usize << (l + 1));
                if (a.levels() - 1) != (levels0 - 1) * sa || (b.levels() - 1) != (levels0 - 1) * sb
                {
                    return Err(Error::InvalidInput(
                        "time levels do not refine by factors of two".into(),
                    ));
                }
                if (a.nodes - 1) != (nodes0 - 1) * sa || (b.nodes - 1) != (nodes0 - 1) * sb {
                    return Err(Error::InvalidInput(
                        "grids do not refine by factors of two".into(),
                    ));
                }
                let mut worst: f64 = 0.0;
                for j in 0..levels0 {
                    for i in 0..nodes0 {
                        let d = a.value(j * sa, i * sa) - b.value(j * sb, i * sb);
                        if !d.is_nan() {
                            worst = worst.max(d.abs());
                        }
                    }
                }
                differences.push((a.h, worst));
            }
            let (order, saturated) = match observed_order_with_floor(&differences, floor) {
                Ok(p) => (Some(p), false),
                Err(Error::DegenerateFit { saturated: true }) => (None, true),
                Err(e) => return Err(e),
            };
            Ok(ConvergenceEntry {
                identity: e0.identity.clone(),
                differences,
                order,
                saturated,
            })
        })
        .collect()
}
