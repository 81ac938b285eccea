//! Method-of-lines evolution of sampled curves under a flow field.

use std::ops::{Add, Mul, Sub};

use log::{debug, info};
use serde::Serialize;

use crate::curve::{jets_from_samples, AdmissibleCurve, AnalyticCurve, CurveJet, Grid};
use crate::error::{Error, Result};
use crate::flow::field::FlowField;
use crate::frenet::{FrenetApparatus, Signs};
use crate::numerics::diff;
use crate::vector::{pg_distance, PgVec4};

/// One stored time level of an evolution.
#[derive(Clone, Debug, Serialize)]
pub struct EvolutionState {
    pub t: f64,
    pub points: Vec<PgVec4>,
    pub apparatus: FrenetApparatus,
    /// `v = ‖∂Ω/∂u‖` per node.
    pub speed: Vec<f64>,
    /// Polyline length `Σ d(Ωᵢ, Ωᵢ₊₁)`.
    pub arc_length: f64,
}

pub fn polyline_arc_length(points: &[PgVec4]) -> f64 {
    points.windows(2).map(|w| pg_distance(w[0], w[1])).sum()
}

/// Apparatus of sampled positions on the label grid.
pub fn sampled_apparatus(points: &[PgVec4], grid: &Grid) -> Result<FrenetApparatus> {
    let jets = jets_from_samples(points, grid.h)?;
    FrenetApparatus::from_jets(&jets, grid)
}

fn velocity(
    points: &[PgVec4],
    grid: &Grid,
    flow: &FlowField,
    t: f64,
) -> Result<(Vec<PgVec4>, FrenetApparatus)> {
    let ap = sampled_apparatus(points, grid)?;
    let v = ap
        .points
        .iter()
        .map(|p| {
            let f = flow.eval(p.s, t);
            p.tangent * f[0] + p.normal * f[1] + p.binormal1 * f[2] + p.binormal2 * f[3]
        })
        .collect();
    Ok((v, ap))
}

fn state(
    t: f64,
    points: Vec<PgVec4>,
    apparatus: FrenetApparatus,
    h: f64,
) -> Result<EvolutionState> {
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    // pg norm of ∂Ω/∂u is |∂x/∂u| whenever the curve is admissible
    let speed = diff(&xs, h, 1, 4)?.into_iter().map(f64::abs).collect();
    Ok(EvolutionState {
        t,
        arc_length: polyline_arc_length(&points),
        points,
        apparatus,
        speed,
    })
}

fn axpy(base: &[PgVec4], k: &[PgVec4], a: f64) -> Vec<PgVec4> {
    base.iter().zip(k).map(|(p, v)| *p + *v * a).collect()
}

/// Integrates `∂Ω/∂t = f₁T + f₂N + f₃B₁ + f₄B₂` with classical RK4.
///
/// The apparatus is recomputed from the current positions at every stage.
/// The flow is evaluated at the grid labels, which stay arc length for
/// inextensible flows. Returns `steps + 1` states starting at `t = 0`.
pub fn evolve(
    curve: &AdmissibleCurve,
    flow: &FlowField,
    dt: f64,
    steps: usize,
) -> Result<Vec<EvolutionState>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "time step {dt} must be positive"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("at least one step is required".into()));
    }
    let grid = curve.grid;
    let wrap = |step: usize| {
        move |e: Error| Error::Evolution {
            step,
            source: Box::new(e),
        }
    };

    let mut points = curve.positions();
    let mut t = 0.0;
    let ap0 = sampled_apparatus(&points, &grid).map_err(wrap(0))?;
    let mut states = vec![state(t, points.clone(), ap0, grid.h)?];
    info!(
        "evolving {} nodes for {steps} steps of dt = {dt}, initial length {}",
        grid.n, states[0].arc_length
    );

    for step in 1..=steps {
        let (k1, _) = velocity(&points, &grid, flow, t).map_err(wrap(step - 1))?;
        let (k2, _) = velocity(&axpy(&points, &k1, dt / 2.0), &grid, flow, t + dt / 2.0)
            .map_err(wrap(step))?;
        let (k3, _) = velocity(&axpy(&points, &k2, dt / 2.0), &grid, flow, t + dt / 2.0)
            .map_err(wrap(step))?;
        let (k4, _) = velocity(&axpy(&points, &k3, dt), &grid, flow, t + dt).map_err(wrap(step))?;
        for i in 0..points.len() {
            points[i] = points[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::StepRejected { step });
        }
        t = step as f64 * dt;
        let ap = sampled_apparatus(&points, &grid).map_err(wrap(step))?;
        let st = state(t, points.clone(), ap, grid.h)?;
        debug!("t = {t:.6}: length {}", st.arc_length);
        states.push(st);
    }
    Ok(states)
}

/// Largest relative change of polyline length against the first state.
pub fn arc_length_drift(states: &[EvolutionState]) -> f64 {
    let l0 = states[0].arc_length;
    states
        .iter()
        .map(|s| ((s.arc_length - l0) / l0).abs())
        .fold(0.0, f64::max)
}

/// Time series of apparatus on a fixed label grid with uniform time step.
#[derive(Clone, Debug)]
pub struct History {
    pub t0: f64,
    pub dt: f64,
    pub grid: Grid,
    pub signs: Signs,
    pub levels: Vec<FrenetApparatus>,
}

impl History {
    pub fn new(t0: f64, dt: f64, levels: Vec<FrenetApparatus>, grid: Grid) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InsufficientHistory { needed: 1, got: 0 });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "time step {dt} must be positive"
            )));
        }
        let signs = levels[0].signs;
        for (j, l) in levels.iter().enumerate() {
            if l.len() != grid.n {
                return Err(Error::InvalidInput(format!(
                    "level {j} has {} nodes, grid has {}",
                    l.len(),
                    grid.n
                )));
            }
            if l.signs != signs {
                return Err(Error::LightlikeDegeneracy {
                    index: None,
                    s: grid.s0,
                    what: format!("sign system changes at time level {j}"),
                });
            }
        }
        Ok(Self {
            t0,
            dt,
            grid,
            signs,
            levels,
        })
    }

    pub fn from_states(states: &[EvolutionState], grid: Grid) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InsufficientHistory {
                needed: 2,
                got: states.len(),
            });
        }
        let dt = states[1].t - states[0].t;
        Self::new(
            states[0].t,
            dt,
            states.iter().map(|s| s.apparatus.clone()).collect(),
            grid,
        )
    }

    /// History built from a closed-form motion `(s, t) -> jet`.
    pub fn from_motion(
        motion: impl Fn(f64, f64) -> CurveJet,
        grid: Grid,
        t0: f64,
        dt: f64,
        count: usize,
    ) -> Result<Self> {
        let levels = (0..count)
            .map(|j| {
                let t = t0 + j as f64 * dt;
                let jets: Vec<CurveJet> = grid.points().into_iter().map(|s| motion(s, t)).collect();
                FrenetApparatus::from_jets(&jets, &grid)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t0, dt, levels, grid)
    }

    /// Exact solution `Ω(s, t) = α(s + c t)` of tangential transport.
    pub fn transported(
        curve: &dyn AnalyticCurve,
        c: f64,
        grid: Grid,
        t0: f64,
        dt: f64,
        count: usize,
    ) -> Result<Self> {
        Self::from_motion(|s, t| curve.jet(s + c * t), grid, t0, dt, count)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(Error::InsufficientHistory {
                needed,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Time derivative at level `j` of a per-level quantity.
    pub fn time_derivative<T>(&self, j: usize, value: impl Fn(usize) -> T) -> Result<T>
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        self.require(3)?;
        Ok(time_derivative(self.len(), j, self.dt, value))
    }
}

/// 3-level central difference in the interior, one-sided second-order
/// differences at the first and last level.
pub fn time_derivative<T>(count: usize, j: usize, dt: f64, value: impl Fn(usize) -> T) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let inv = 1.0 / (2.0 * dt);
    if j == 0 {
        let v0 = value(0);
        ((value(1) - v0) * 4.0 - (value(2) - v0)) * inv
    } else if j == count - 1 {
        let v = value(j);
        ((v - value(j - 1)) * 4.0 - (v - value(j - 2))) * inv
    } else {
        (value(j + 1) - value(j - 1)) * inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Helix;
    use std::f64::consts::PI;

    fn helix_curve(n: usize) -> AdmissibleCurve {
        AdmissibleCurve::analytic(Helix::new(1.0, 1.0, 1.0), (0.0, 2.0 * PI), n).unwrap()
    }

    #[test]
    fn static_flow_keeps_positions() {
        let c = helix_curve(64);
        let states = evolve(&c, &FlowField::zero(), 0.05, 5).unwrap();
        assert_eq!(states.len(), 6);
        let p0 = &states[0].points;
        for (a, b) in p0.iter().zip(&states[5].points) {
            assert!((*a - *b).max_abs() <= 1e-14);
        }
    }

    #[test]
    fn tangential_flow_matches_translation() {
        let h = Helix::new(1.0, 1.0, 1.0);
        let c = helix_curve(128);
        let states = evolve(&c, &FlowField::tangential(1.0), 0.02, 10).unwrap();
        let last = states.last().unwrap();
        for (i, p) in last.points.iter().enumerate() {
            let exact = h.position(c.grid.at(i) + last.t);
            // one-sided stencils at the ends carry larger truncation error
            let tol = if i < 4 || i + 4 >= last.points.len() {
                5e-5
            } else {
                1e-6
            };
            assert!(
                (*p - exact).max_abs() < tol,
                "{i}: {}",
                (*p - exact).max_abs()
            );
        }
        assert!(arc_length_drift(&states) < 1e-12);
        assert!(last.speed.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = helix_curve(32);
        assert!(evolve(&c, &FlowField::zero(), 0.0, 3).is_err());
        assert!(evolve(&c, &FlowField::zero(), 0.1, 0).is_err());
    }

    #[test]
    fn degeneracy_reports_time_index() {
        use crate::curve::PolynomialCurve;
        let line = PolynomialCurve {
            y: vec![0.0, 1.0],
            z: vec![],
            w: vec![],
        };
        let c = AdmissibleCurve::analytic(line, (0.0, 1.0), 32).unwrap();
        let err = evolve(&c, &FlowField::tangential(1.0), 0.1, 2).unwrap_err();
        assert!(matches!(err, Error::Evolution { step: 0, .. }));
        assert!(err.is_degeneracy());
    }

    #[test]
    fn one_sided_time_derivatives_are_exact_for_quadratics() {
        let q = |j: usize| {
            let t = 0.1 * j as f64;
            t * t
        };
        for j in 0..5 {
            let d = time_derivative(5, j, 0.1, q);
            assert!((d - 0.2 * j as f64).abs() < 1e-12, "{j}: {d}");
        }
    }

    #[test]
    fn transported_history_needs_three_levels() {
        let grid = Grid::span(0.0, 1.0, 32).unwrap();
        let hist =
            History::transported(&Helix::new(1.0, 1.0, 1.0), 1.0, grid, 0.0, 0.1, 2).unwrap();
        assert!(matches!(
            hist.time_derivative(0, |j| hist.levels[j].points[0].kappa),
            Err(Error::InsufficientHistory { needed: 3, got: 2 })
        ));
    }
}
