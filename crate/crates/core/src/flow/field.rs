//! Flow velocity fields `∂Ω/∂t = f₁T + f₂N + f₃B₁ + f₄B₂`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::diff;

/// One velocity component as written in a flow definition file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Const(f64),
    /// Coefficients of a polynomial in `s`, lowest degree first.
    PolyS(Vec<f64>),
    Sin {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// CSV file with header `s,value`.
    Table(PathBuf),
}

/// Samples of a component in `s`, linearly interpolated and held constant
/// beyond the first and last rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub s: Vec<f64>,
    pub value: Vec<f64>,
}

impl Table {
    pub fn new(s: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if s.len() != value.len() || s.is_empty() {
            return Err(Error::InvalidInput(
                "table needs matching, non-empty columns".into(),
            ));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "table s column must be strictly increasing".into(),
            ));
        }
        if s.iter().chain(&value).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "table contains non-finite values".into(),
            ));
        }
        Ok(Self { s, value })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            s: f64,
            value: f64,
        }
        let mut rdr = csv::Reader::from_path(path)?;
        let (mut s, mut value) = (Vec::new(), Vec::new());
        for row in rdr.deserialize() {
            let row: Row = row?;
            s.push(row.s);
            value.push(row.value);
        }
        Self::new(s, value)
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.s.len();
        if s <= self.s[0] {
            return self.value[0];
        }
        if s >= self.s[n - 1] {
            return self.value[n - 1];
        }
        let k = self.s.partition_point(|&x| x <= s);
        let (s0, s1) = (self.s[k - 1], self.s[k]);
        let w = (s - s0) / (s1 - s0);
        self.value[k - 1] * (1.0 - w) + self.value[k] * w
    }
}

pub type ComponentFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum FlowComponent {
    Const(f64),
    PolyS(Vec<f64>),
    Sin {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    Table(Table),
    /// Arbitrary `(s, t) -> value`.
    Custom(ComponentFn),
}

impl fmt::Debug for FlowComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(c) => write!(f, "Const({c})"),
            Self::PolyS(c) => write!(f, "PolyS({c:?})"),
            Self::Sin { amp, freq, phase } => {
                write!(f, "Sin {{ amp: {amp}, freq: {freq}, phase: {phase} }}")
            }
            Self::Table(t) => write!(f, "Table({} rows)", t.s.len()),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl FlowComponent {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    /// Resolves a file spec; table paths are taken relative to `base`.
    pub fn from_spec(spec: &ComponentSpec, base: Option<&Path>) -> Result<Self> {
        Ok(match spec {
            ComponentSpec::Const(c) => Self::Const(*c),
            ComponentSpec::PolyS(c) => Self::PolyS(c.clone()),
            ComponentSpec::Sin { amp, freq, phase } => Self::Sin {
                amp: *amp,
                freq: *freq,
                phase: *phase,
            },
            ComponentSpec::Table(p) => {
                let path = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                Self::Table(Table::read_csv(&path)?)
            }
        })
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Self::Const(c) => *c,
            Self::PolyS(c) => c.iter().rev().fold(0.0, |acc, k| acc * s + k),
            Self::Sin { amp, freq, phase } => amp * (freq * s + phase).sin(),
            Self::Table(tab) => tab.eval(s),
            Self::Custom(f) => f(s, t),
        }
    }

    /// `true` when the component cannot vary in `s` or `t`.
    pub fn is_structurally_constant(&self) -> bool {
        match self {
            Self::Const(_) => true,
            Self::PolyS(c) => c.iter().skip(1).all(|k| *k == 0.0),
            Self::Sin { amp, freq, .. } => *amp == 0.0 || *freq == 0.0,
            _ => false,
        }
    }
}

/// The four components `f₁..f₄` along `T, N, B₁, B₂`.
#[derive(Clone, Debug)]
pub struct FlowField {
    pub components: [FlowComponent; 4],
}

impl FlowField {
    pub fn new(components: [FlowComponent; 4]) -> Self {
        Self { components }
    }

    pub fn zero() -> Self {
        Self::constant([0.0; 4])
    }

    pub fn constant(c: [f64; 4]) -> Self {
        Self::new(c.map(FlowComponent::Const))
    }

    /// Pure tangential transport `f = (c, 0, 0, 0)`.
    pub fn tangential(c: f64) -> Self {
        Self::constant([c, 0.0, 0.0, 0.0])
    }

    pub fn eval(&self, s: f64, t: f64) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.components[k].eval(s, t))
    }

    /// Component `k` sampled on the grid `s0 + i h` at time `t`.
    pub fn sample(&self, k: usize, s0: f64, h: f64, n: usize, t: f64) -> Vec<f64> {
        (0..n)
            .map(|i| self.components[k].eval(s0 + i as f64 * h, t))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c, FlowComponent::Const(v) if *v == 0.0))
    }
}

/// `∂f₁/∂u` on the grid; on arc-length grids `∂/∂u = ∂/∂s`.
pub fn speed_rate(flow: &FlowField, s0: f64, h: f64, n: usize, t: f64) -> Result<Vec<f64>> {
    if flow.components[0].is_structurally_constant() {
        return Ok(vec![0.0; n]);
    }
    let f1 = flow.sample(0, s0, h, n, t);
    diff(&f1, h, 1, 4)
}

/// Whether `max |∂f₁/∂u| <= tol` over `n` samples of `[a, b]`.
pub fn is_inextensible(
    flow: &FlowField,
    domain: (f64, f64),
    n: usize,
    t: f64,
    tol: f64,
) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if flow.components[0].is_structurally_constant() {
        return Ok(true);
    }
    let (a, b) = domain;
    if !(b > a) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "invalid sampling of [{a}, {b}] with {n} points"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    let rate = speed_rate(flow, a, h, n, t)?;
    Ok(rate.iter().all(|r| r.abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_rate_cases() {
        let n = 64;
        let h = 0.05;
        let zero = speed_rate(&FlowField::tangential(2.5), 0.0, h, n, 0.0).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));

        let lin = FlowField::new([
            FlowComponent::PolyS(vec![0.0, 1.0]),
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
        ]);
        for v in speed_rate(&lin, 0.0, h, n, 0.0).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }

        let sine = FlowField::new([
            FlowComponent::Sin {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
        ]);
        for (i, v) in speed_rate(&sine, 0.0, h, n, 0.0)
            .unwrap()
            .iter()
            .enumerate()
        {
            assert!((v - (i as f64 * h).cos()).abs() < 5e-6);
        }
    }

    #[test]
    fn inextensibility_depends_on_f1_only() {
        let dom = (0.0, 6.0);
        let lin = FlowField::new([
            FlowComponent::PolyS(vec![0.0, 1.0]),
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
            FlowComponent::Const(0.0),
        ]);
        assert!(!is_inextensible(&lin, dom, 100, 0.0, 1e-9).unwrap());
        let mixed = FlowField::new([
            FlowComponent::Const(2.0),
            FlowComponent::Sin {
                amp: 1.0,
                freq: 1.0,
                phase: 0.0,
            },
            FlowComponent::PolyS(vec![0.0, 0.0, 1.0]),
            FlowComponent::Const(1.0),
        ]);
        assert!(is_inextensible(&mixed, dom, 100, 0.0, 1e-9).unwrap());
        assert!(is_inextensible(&mixed, dom, 100, 0.0, 0.0).is_err());
    }

    #[test]
    fn spec_json_shapes() {
        let specs: Vec<ComponentSpec> = serde_json::from_str(
            r#"[{"const": 1.5}, {"poly_s": [0, 1]}, {"sin": {"amp": 2, "freq": 3, "phase": 0.5}}, {"table": "f.csv"}]"#,
        )
        .unwrap();
        assert_eq!(specs[0], ComponentSpec::Const(1.5));
        assert_eq!(specs[1], ComponentSpec::PolyS(vec![0.0, 1.0]));
        assert_eq!(
            specs[2],
            ComponentSpec::Sin {
                amp: 2.0,
                freq: 3.0,
                phase: 0.5
            }
        );
        assert_eq!(specs[3], ComponentSpec::Table("f.csv".into()));
    }

    #[test]
    fn table_interpolation() {
        let t = Table::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(2.0), 1.0);
        assert_eq!(t.eval(5.0), 0.0);
        assert!(Table::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}
