//! Curve and flow definition files, and the CSV/JSON artifacts written by
//! the command-line tool.
//!
//! Floating-point output carries 17 significant digits so that every value
//! round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::{AdmissibleCurve, AnalyticCurve, Helix, PolynomialCurve, SampledCurve};
use crate::energy::{Direction, EnergyReport, Field, PseudoAngleReport};
use crate::error::{Error, Result};
use crate::flow::evolve::EvolutionState;
use crate::flow::field::{ComponentSpec, FlowComponent, FlowField};
use crate::frenet::FrenetApparatus;
use crate::vector::PgVec4;

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Rewrites every non-integer JSON number with 17 significant digits;
/// non-finite values become `null`.
pub fn precise(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => match n.as_f64() {
            Some(x) if x.is_finite() => {
                serde_json::from_str(&fmt17(x)).map_or(Value::Number(n), Value::Number)
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(precise).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, precise(v))).collect()),
        other => other,
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&precise(
        serde_json::to_value(value)?,
    ))?)
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelixParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    #[serde(default)]
    pub wobble_amp: f64,
    #[serde(default)]
    pub wobble_freq: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialParams {
    #[serde(default)]
    pub y: Vec<f64>,
    #[serde(default)]
    pub z: Vec<f64>,
    #[serde(default)]
    pub w: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledParams {
    /// Inline `[s, x, y, z, w]` rows.
    #[serde(default)]
    pub rows: Option<Vec<[f64; 5]>>,
    /// CSV with header `s,x,y,z,w`, relative to the curve file.
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

/// Contents of a curve definition file, keyed by its `family` field.
#[derive(Clone, Debug)]
pub enum CurveSpec {
    Helix {
        params: HelixParams,
        domain: [f64; 2],
        n: usize,
    },
    Polynomial {
        params: PolynomialParams,
        domain: [f64; 2],
        n: usize,
    },
    Sampled {
        params: SampledParams,
        domain: Option<[f64; 2]>,
        n: Option<usize>,
    },
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Copy, Debug, Default)]
pub struct CurveOverrides {
    pub n: Option<usize>,
    pub domain: Option<(f64, f64)>,
}

fn read_sample_rows(path: &Path) -> Result<Vec<[f64; 5]>> {
    #[derive(Deserialize)]
    struct Row {
        s: f64,
        x: f64,
        y: f64,
        z: f64,
        w: f64,
    }
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize()
        .map(|r| {
            let r: Row = r?;
            Ok([r.s, r.x, r.y, r.z, r.w])
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurveSpec {
    family: String,
    params: Value,
    #[serde(default)]
    domain: Option<[f64; 2]>,
    #[serde(default)]
    n: Option<usize>,
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCurveSpec = serde_json::from_str(text)?;
        let required =
            |what: &str| Error::InvalidInput(format!("{} curve needs `{what}`", raw.family));
        let analytic = || -> Result<([f64; 2], usize)> {
            Ok((
                raw.domain.ok_or_else(|| required("domain"))?,
                raw.n.ok_or_else(|| required("n"))?,
            ))
        };
        match raw.family.as_str() {
            "helix" => {
                let (domain, n) = analytic()?;
                let params = serde_json::from_value(raw.params.clone())?;
                Ok(CurveSpec::Helix { params, domain, n })
            }
            "polynomial" => {
                let (domain, n) = analytic()?;
                let params = serde_json::from_value(raw.params.clone())?;
                Ok(CurveSpec::Polynomial { params, domain, n })
            }
            "sampled" => Ok(CurveSpec::Sampled {
                params: serde_json::from_value(raw.params)?,
                domain: raw.domain,
                n: raw.n,
            }),
            other => Err(Error::InvalidInput(format!(
                "unknown curve family {other:?} (expected helix, polynomial or sampled)"
            ))),
        }
    }

    /// Builds the curve; relative CSV paths resolve against `base`.
    pub fn build(&self, base: Option<&Path>, overrides: CurveOverrides) -> Result<AdmissibleCurve> {
        let analytic = |c: Arc<dyn AnalyticCurve>, domain: [f64; 2], n: usize| {
            let d = overrides.domain.unwrap_or((domain[0], domain[1]));
            AdmissibleCurve::from_arc(c, d, overrides.n.unwrap_or(n))
        };
        match self {
            CurveSpec::Helix {
                params: p,
                domain,
                n,
            } => {
                let h = Helix::new(p.a, p.b, p.k).with_wobble(p.wobble_amp, p.wobble_freq);
                analytic(Arc::new(h), *domain, *n)
            }
            CurveSpec::Polynomial {
                params: p,
                domain,
                n,
            } => {
                let c = PolynomialCurve {
                    y: p.y.clone(),
                    z: p.z.clone(),
                    w: p.w.clone(),
                };
                analytic(Arc::new(c), *domain, *n)
            }
            CurveSpec::Sampled { params, domain, n } => {
                let rows = match (&params.rows, &params.csv) {
                    (Some(r), None) => r.clone(),
                    (None, Some(p)) => read_sample_rows(&resolve(base, p))?,
                    _ => {
                        return Err(Error::InvalidInput(
                            "sampled curve needs exactly one of `rows` or `csv`".into(),
                        ))
                    }
                };
                let s: Vec<f64> = rows.iter().map(|r| r[0]).collect();
                let points = rows
                    .iter()
                    .map(|r| PgVec4::new(r[1], r[2], r[3], r[4]))
                    .collect();
                let curve = SampledCurve::new(&s, points)?;
                if let Some(n) = overrides.n.or(*n) {
                    if n != curve.grid.n {
                        log::warn!(
                            "sampled curve has {} samples; ignoring n = {n}",
                            curve.grid.n
                        );
                    }
                }
                match overrides.domain.or(domain.map(|d| (d[0], d[1]))) {
                    Some((a, b)) => {
                        let (ia, ib) = curve.grid.sub_range(a, b)?;
                        let s = &s[ia..=ib];
                        SampledCurve::new(s, curve.points[ia..=ib].to_vec())
                            .map(AdmissibleCurve::sampled)
                    }
                    None => Ok(AdmissibleCurve::sampled(curve)),
                }
            }
        }
    }
}

fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

pub fn load_curve(path: &Path, overrides: CurveOverrides) -> Result<AdmissibleCurve> {
    let spec = CurveSpec::from_json(&fs::read_to_string(path)?)?;
    spec.build(path.parent(), overrides)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    #[serde(default = "zero_spec")]
    pub f1: ComponentSpec,
    #[serde(default = "zero_spec")]
    pub f2: ComponentSpec,
    #[serde(default = "zero_spec")]
    pub f3: ComponentSpec,
    #[serde(default = "zero_spec")]
    pub f4: ComponentSpec,
}

fn zero_spec() -> ComponentSpec {
    ComponentSpec::Const(0.0)
}

impl FlowSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self, base: Option<&Path>) -> Result<FlowField> {
        Ok(FlowField::new([
            FlowComponent::from_spec(&self.f1, base)?,
            FlowComponent::from_spec(&self.f2, base)?,
            FlowComponent::from_spec(&self.f3, base)?,
            FlowComponent::from_spec(&self.f4, base)?,
        ]))
    }
}

pub fn load_flow(path: &Path) -> Result<FlowField> {
    FlowSpec::from_json(&fs::read_to_string(path)?)?.build(path.parent())
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn record(values: impl IntoIterator<Item = f64>) -> Vec<String> {
    values.into_iter().map(fmt17).collect()
}

pub const APPARATUS_HEADER: [&str; 20] = [
    "s", "kappa", "tau", "sigma", "Tx", "Ty", "Tz", "Tw", "Nx", "Ny", "Nz", "Nw", "B1x", "B1y",
    "B1z", "B1w", "B2x", "B2y", "B2z", "B2w",
];

/// Per-node table preceded by a `#` comment line carrying the signs.
pub fn write_apparatus_csv<W: Write>(mut out: W, ap: &FrenetApparatus) -> Result<()> {
    let e = &ap.signs;
    writeln!(
        out,
        "# eps1={} eps2={} eps3={} mu={}",
        e.eps1, e.eps2, e.eps3, e.mu
    )?;
    let mut w = csv_writer(out);
    w.write_record(APPARATUS_HEADER)?;
    for p in &ap.points {
        let mut row = vec![p.s, p.kappa, p.tau, p.sigma];
        for v in p.frame() {
            row.extend(v.to_array());
        }
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn apparatus_json(ap: &FrenetApparatus) -> Result<String> {
    to_json_string(ap)
}

pub const EVOLUTION_HEADER: [&str; 10] = [
    "t",
    "s",
    "x",
    "y",
    "z",
    "w",
    "kappa",
    "tau",
    "sigma",
    "arclength",
];

pub fn write_evolution_csv<W: Write>(out: W, states: &[EvolutionState]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(EVOLUTION_HEADER)?;
    for st in states {
        for (p, fp) in st.points.iter().zip(&st.apparatus.points) {
            w.write_record(record([
                st.t,
                fp.s,
                p.x,
                p.y,
                p.z,
                p.w,
                fp.kappa,
                fp.tau,
                fp.sigma,
                st.arc_length,
            ]))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Record of one energy or pseudo-angle in the output file format.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralRecord {
    pub field: Field,
    pub direction: Direction,
    pub domain: (f64, f64),
    pub value: f64,
    pub branch_flag: bool,
    pub quadrature_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate_value: Option<f64>,
}

impl From<&EnergyReport> for IntegralRecord {
    fn from(r: &EnergyReport) -> Self {
        Self {
            field: r.field,
            direction: r.direction,
            domain: r.domain,
            value: r.value,
            branch_flag: false,
            quadrature_error: r.quadrature_error,
            alternate_value: r.alternate_value,
        }
    }
}

impl From<&PseudoAngleReport> for IntegralRecord {
    fn from(r: &PseudoAngleReport) -> Self {
        Self {
            field: r.field,
            direction: r.direction,
            domain: r.domain,
            value: r.value,
            branch_flag: r.branch_flag,
            quadrature_error: r.quadrature_error,
            alternate_value: None,
        }
    }
}

/// `param,integrand` dump of stored samples.
pub fn write_samples_csv<W: Write>(out: W, params: &[f64], samples: &[f64]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["param", "integrand"])?;
    for (p, v) in params.iter().zip(samples) {
        w.write_record(record([*p, *v]))?;
    }
    w.flush()?;
    Ok(())
}

/// Run metadata, kept out of the data files so those stay deterministic.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub unix_time: u64,
}

impl RunMeta {
    pub fn new(command: &str, arguments: Vec<String>) -> Self {
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments,
            unix_time,
        }
    }
}

/// `out.csv` becomes `out.csv.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn write_sidecar(out: &Path, meta: &RunMeta) -> Result<()> {
    fs::write(sidecar_path(out), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}
