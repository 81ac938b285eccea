//! Bending energies and pseudo-angles of the frame fields along s-lines
//! (fixed time) and t-lines (fixed node).
//!
//! Energies are definite integrals of the reduced integrands; integration
//! constants are zero. Quadrature is composite Simpson on the stored grid.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::evolve::History;
use crate::flow::extended::{gamma_coeffs_numeric, sampled_flow, xi_point};
use crate::flow::field::FlowField;
use crate::frenet::{FrenetApparatus, Signs};
use crate::numerics::simpson_with_estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    T,
    N,
    B1,
    B2,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::T, Field::N, Field::B1, Field::B2];
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::T => "T",
            Field::N => "N",
            Field::B1 => "B1",
            Field::B2 => "B2",
        })
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(Field::T),
            "N" | "n" => Ok(Field::N),
            "B1" | "b1" => Ok(Field::B1),
            "B2" | "b2" => Ok(Field::B2),
            _ => Err(Error::InvalidInput(format!("unknown frame field {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "s-line")]
    S,
    #[serde(rename = "t-line")]
    T,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub field: Field,
    pub direction: Direction,
    pub domain: (f64, f64),
    pub value: f64,
    pub quadrature_error: Option<f64>,
    /// Only for the `B₁` s-line energy: the value with `ε₃σ²` in place of
    /// `ε₁σ²` in the integrand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate_value: Option<f64>,
    pub three_eighths_tail: bool,
    #[serde(skip)]
    pub params: Vec<f64>,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoAngleReport {
    pub field: Field,
    pub direction: Direction,
    pub domain: (f64, f64),
    /// Magnitude; imaginary when `branch_flag` is set.
    pub value: f64,
    pub branch_flag: bool,
    pub quadrature_error: Option<f64>,
    #[serde(skip)]
    pub params: Vec<f64>,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// `√x` for `x ≥ 0`, `√|x|` flagged otherwise.
fn branch_sqrt(x: f64) -> (f64, bool) {
    (x.abs().sqrt(), x < 0.0)
}

fn s_window(ap: &FrenetApparatus, domain: (f64, f64)) -> Result<(usize, usize)> {
    ap.grid().sub_range(domain.0, domain.1)
}

fn t_window(history: &History, domain: (f64, f64)) -> Result<(usize, usize)> {
    let levels = crate::curve::Grid {
        s0: history.t0,
        h: history.dt,
        n: history.len(),
    };
    levels.sub_range(domain.0, domain.1)
}

fn energy_integrand_s(field: Field, e: &Signs, k: f64, t: f64, s: f64) -> f64 {
    match field {
        Field::T => (1.0 + e.eps1 * k * k) / 2.0,
        Field::N => (e.eps1 + e.eps2 * t * t) / 2.0,
        Field::B1 => (e.eps2 + e.eps1 * t * t + e.eps1 * s * s) / 2.0,
        Field::B2 => (e.eps3 + e.eps3 * s * s) / 2.0,
    }
}

pub fn energy_s(ap: &FrenetApparatus, field: Field, domain: (f64, f64)) -> Result<EnergyReport> {
    let (ia, ib) = s_window(ap, domain)?;
    let pts = &ap.points[ia..=ib];
    let e = &ap.signs;
    let samples: Vec<f64> = pts
        .iter()
        .map(|p| energy_integrand_s(field, e, p.kappa, p.tau, p.sigma))
        .collect();
    let q = simpson_with_estimate(&samples, ap.h)?;
    let alternate_value = match field {
        Field::B1 => {
            let alt: Vec<f64> = pts
                .iter()
                .map(|p| (e.eps2 + e.eps1 * p.tau * p.tau + e.eps3 * p.sigma * p.sigma) / 2.0)
                .collect();
            Some(simpson_with_estimate(&alt, ap.h)?.value)
        }
        _ => None,
    };
    Ok(EnergyReport {
        field,
        direction: Direction::S,
        domain,
        value: q.value,
        quadrature_error: q.error_estimate,
        alternate_value,
        three_eighths_tail: q.three_eighths_tail,
        params: pts.iter().map(|p| p.s).collect(),
        samples,
    })
}

pub fn pseudo_angle_s(
    ap: &FrenetApparatus,
    field: Field,
    domain: (f64, f64),
) -> Result<PseudoAngleReport> {
    let (ia, ib) = s_window(ap, domain)?;
    let pts = &ap.points[ia..=ib];
    let e = &ap.signs;
    // prefactor √ε outside the integral, or the radicand inside it
    let (outer, mut flag) = match field {
        Field::T => branch_sqrt(e.eps1),
        Field::N | Field::B2 => branch_sqrt(e.eps2),
        Field::B1 => (1.0, false),
    };
    let samples: Vec<f64> = pts
        .iter()
        .map(|p| match field {
            Field::T => p.kappa,
            Field::N => p.tau,
            Field::B2 => p.sigma,
            Field::B1 => {
                let (r, neg) = branch_sqrt(e.eps1 * p.tau * p.tau + e.eps3 * p.sigma * p.sigma);
                flag |= neg;
                r
            }
        })
        .collect();
    let q = simpson_with_estimate(&samples, ap.h)?;
    Ok(PseudoAngleReport {
        field,
        direction: Direction::S,
        domain,
        value: 0.5 * outer * q.value,
        branch_flag: flag,
        quadrature_error: q.error_estimate.map(|x| 0.5 * outer * x),
        params: pts.iter().map(|p| p.s).collect(),
        samples,
    })
}

/// Per-level quantities at one node that the t-line integrands use.
struct TLine {
    times: Vec<f64>,
    signs: Signs,
    /// `(ξ, Γ, f, f_s, κ, τ, σ)` per level.
    rows: Vec<([f64; 3], [f64; 3], [f64; 4], [f64; 4], [f64; 3])>,
}

impl TLine {
    fn new(history: &History, flow: &FlowField, node: usize, domain: (f64, f64)) -> Result<Self> {
        history.require(3)?;
        if node >= history.grid.n {
            return Err(Error::InvalidInput(format!(
                "node {node} outside a grid of {} nodes",
                history.grid.n
            )));
        }
        let (ja, jb) = t_window(history, domain)?;
        let gammas = gamma_coeffs_numeric(history)?;
        let mut rows = Vec::with_capacity(jb - ja + 1);
        for j in ja..=jb {
            let ap = &history.levels[j];
            let (f, f_s) = sampled_flow(ap, flow, history.time(j))?;
            let fi = [0, 1, 2, 3].map(|k| f[k][node]);
            let fsi = [0, 1, 2, 3].map(|k| f_s[k][node]);
            let p = &ap.points[node];
            let xi = xi_point(&history.signs, p.kappa, p.tau, p.sigma, fi, fsi);
            rows.push((xi, gammas[j][node], fi, fsi, [p.kappa, p.tau, p.sigma]));
        }
        Ok(Self {
            times: (ja..=jb).map(|j| history.time(j)).collect(),
            signs: history.signs,
            rows,
        })
    }

    /// The bracketed sums of the t-line integrands without their leading
    /// `ε` constant, and that constant.
    fn brackets(&self, field: Field) -> (f64, Vec<f64>) {
        let Signs {
            eps1: e1,
            eps2: e2,
            eps3: e3,
            ..
        } = self.signs;
        let lead = match field {
            Field::T => 1.0,
            Field::N => e1,
            Field::B1 => e2,
            Field::B2 => e3,
        };
        let values = self
            .rows
            .iter()
            .map(|(xi, g, f, fs, c)| {
                let [k, t, s] = *c;
                match field {
                    Field::T => e1 * (xi[0] * xi[0] + e2 * xi[1] * xi[1] + e3 * xi[2] * xi[2]),
                    Field::N => {
                        (t * f[2] - k * f[0] - e1 * fs[1]).powi(2)
                            + e2 * g[0] * g[0]
                            + e3 * g[1] * g[1]
                    }
                    Field::B1 => {
                        (s * f[3] - t * f[1] - e2 * fs[2]).powi(2)
                            + e1 * g[0] * g[0]
                            + e3 * g[2] * g[2]
                    }
                    Field::B2 => {
                        (s * f[2] - e3 * fs[3]).powi(2) + e1 * g[1] * g[1] + e2 * g[2] * g[2]
                    }
                }
            })
            .collect();
        (lead, values)
    }
}

pub fn energy_t(
    history: &History,
    flow: &FlowField,
    node: usize,
    field: Field,
    domain: (f64, f64),
) -> Result<EnergyReport> {
    let line = TLine::new(history, flow, node, domain)?;
    let (lead, bracket) = line.brackets(field);
    let samples: Vec<f64> = bracket.iter().map(|b| (lead + b) / 2.0).collect();
    let q = simpson_with_estimate(&samples, history.dt)?;
    Ok(EnergyReport {
        field,
        direction: Direction::T,
        domain,
        value: q.value,
        quadrature_error: q.error_estimate,
        alternate_value: None,
        three_eighths_tail: q.three_eighths_tail,
        params: line.times,
        samples,
    })
}

pub fn pseudo_angle_t(
    history: &History,
    flow: &FlowField,
    node: usize,
    field: Field,
    domain: (f64, f64),
) -> Result<PseudoAngleReport> {
    let line = TLine::new(history, flow, node, domain)?;
    let (_, bracket) = line.brackets(field);
    let mut flag = false;
    let samples: Vec<f64> = bracket
        .iter()
        .map(|b| {
            let (r, neg) = branch_sqrt(*b);
            flag |= neg;
            r
        })
        .collect();
    let q = simpson_with_estimate(&samples, history.dt)?;
    Ok(PseudoAngleReport {
        field,
        direction: Direction::T,
        domain,
        value: 0.5 * q.value,
        branch_flag: flag,
        quadrature_error: q.error_estimate.map(|x| 0.5 * x),
        params: line.times,
        samples,
    })
}
