//! A closed-form moving curve used as a convergence reference.
//!
//! The curve `α` is transported along itself with speed `c` and rotated in
//! the `z,w` plane by the angle `θ(t) = (ω₀/ν) sin νt`:
//!
//! `Ω(s, t) = R(θ(t)) α(s + c t)`.
//!
//! The rotation fixes `x` and preserves `-y² + z² + w²`, so every time level
//! is congruent to `α` and arc length is preserved. The velocity is
//! `c T + θ'(t) J Ω` with `J(x, y, z, w) = (0, 0, -w, z)`, whose frame
//! components are `f₁ = c` and `f_k = θ'(t) g_k(s + c t)` for `k = 2, 3, 4`,
//! where `g_k` are the components of `J α` in the frame of `α`.

use std::sync::Arc;

use crate::curve::{AnalyticCurve, CurveJet, Grid};
use crate::error::Result;
use crate::flow::evolve::History;
use crate::flow::field::{FlowComponent, FlowField};
use crate::frenet::frame_from_jet;
use crate::vector::{pg_dot, PgVec4};

#[derive(Clone, Debug)]
pub struct RotatingTransport {
    pub curve: Arc<dyn AnalyticCurve>,
    pub c: f64,
    pub omega0: f64,
    pub nu: f64,
}

fn rotate(v: PgVec4, angle: f64) -> PgVec4 {
    let (sn, cs) = angle.sin_cos();
    PgVec4::new(v.x, v.y, cs * v.z - sn * v.w, sn * v.z + cs * v.w)
}

fn quarter_turn(v: PgVec4) -> PgVec4 {
    PgVec4::new(0.0, 0.0, -v.w, v.z)
}

impl RotatingTransport {
    pub fn new(curve: Arc<dyn AnalyticCurve>, c: f64, omega0: f64, nu: f64) -> Self {
        Self {
            curve,
            c,
            omega0,
            nu,
        }
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.omega0 / self.nu * (self.nu * t).sin()
    }

    pub fn angular_rate(&self, t: f64) -> f64 {
        self.omega0 * (self.nu * t).cos()
    }

    pub fn jet(&self, s: f64, t: f64) -> CurveJet {
        let j = self.curve.jet(s + self.c * t);
        let a = self.angle(t);
        CurveJet {
            position: rotate(j.position, a),
            d1: rotate(j.d1, a),
            d2: rotate(j.d2, a),
            d3: rotate(j.d3, a),
            d4: rotate(j.d4, a),
        }
    }

    /// `g_k(u)` for `k = 2, 3, 4`: components of `J α(u)` along `N, B₁, B₂`.
    pub fn profile(curve: &dyn AnalyticCurve, u: f64) -> Result<[f64; 3]> {
        let p = frame_from_jet(&curve.jet(u), u)?;
        let v = quarter_turn(p.position);
        Ok([p.normal, p.binormal1, p.binormal2].map(|e| pg_dot(v, e) / pg_dot(e, e)))
    }

    /// The generating flow. Components whose frame is degenerate evaluate
    /// to NaN, which the residual statistics then expose.
    pub fn flow(&self) -> FlowField {
        let component = |k: usize| {
            let me = self.clone();
            FlowComponent::custom(move |s, t| {
                match Self::profile(me.curve.as_ref(), s + me.c * t) {
                    Ok(g) => me.angular_rate(t) * g[k],
                    Err(_) => f64::NAN,
                }
            })
        };
        FlowField::new([
            FlowComponent::Const(self.c),
            component(0),
            component(1),
            component(2),
        ])
    }

    pub fn history(&self, grid: Grid, t0: f64, dt: f64, count: usize) -> Result<History> {
        History::from_motion(|s, t| self.jet(s, t), grid, t0, dt, count)
    }
}
