//! Metric spec files.
//!
//! A spec is a TOML document with these sections:
//!
//! ```toml
//! [chart]
//! coordinates = ["t", "theta1", "theta2"]
//! intervals = [["0", "pi/2"], ["0", "2*pi"], ["0", "2*pi"]]  # open intervals
//! margin = 0.001                                               # optional
//!
//! [metric]            # entries g_i_j with i <= j; missing entries are 0
//! g_0_0 = "1"
//! g_1_1 = "sin(t)^2*(1 - 2*sin(t)^2)"
//!
//! [signature]
//! type = "lorentzian"  # or "riemannian"
//!
//! [killing]           # optional
//! T_1 = "1"
//! T_2 = "1"
//! unit = true
//! ```
//!
//! Interval bounds may be TOML numbers or constant expressions. Indices are
//! zero-based chart positions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr, Func};

pub const MAX_DIMENSION: usize = 8;
pub const DEFAULT_CHART_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl Signature {
    pub fn name(self) -> &'static str {
        match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "riemannian" => Ok(Signature::Riemannian),
            "lorentzian" => Ok(Signature::Lorentzian),
            other => Err(Error::InvalidSignature(other.to_string())),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Signature::Riemannian => Signature::Lorentzian,
            Signature::Lorentzian => Signature::Riemannian,
        }
    }
}

/// Single coordinate chart: names and open intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub coords: Vec<String>,
    pub intervals: Vec<(f64, f64)>,
    pub margin: f64,
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Error unless every coordinate is at least `margin` inside its interval.
    pub fn check_interior(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                self.dim()
            )));
        }
        for ((x, (lo, hi)), name) in point.iter().zip(&self.intervals).zip(&self.coords) {
            if !(*x >= lo + self.margin && *x <= hi - self.margin) {
                return Err(Error::ChartBoundary {
                    point: point.to_vec(),
                    coordinate: name.clone(),
                    margin: self.margin,
                });
            }
        }
        Ok(())
    }

    /// The sampling box `[lo + margin, hi - margin]` per coordinate.
    pub fn interior_box(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|(lo, hi)| (lo + self.margin, hi - self.margin))
            .collect()
    }
}

/// Killing field components as read from a `[killing]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingSpec {
    pub components: Vec<Expr>,
    pub unit: bool,
}

/// A metric in one chart, components stored for `i <= j` only.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub chart: Chart,
    components: Vec<Expr>,
    pub signature: Signature,
    pub killing: Option<KillingSpec>,
}

fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricSpec {
    /// Build from a full component getter; only `i <= j` is read.
    pub fn new(
        chart: Chart,
        signature: Signature,
        mut component: impl FnMut(usize, usize) -> Expr,
    ) -> Result<Self> {
        let n = chart.dim();
        validate_chart(&chart)?;
        let mut components = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let e = component(i, j);
                if e.max_var().is_some_and(|m| m >= n) {
                    return Err(Error::DimensionMismatch(format!(
                        "component g_{i}_{j} references a coordinate beyond dimension {n}"
                    )));
                }
                components.push(e);
            }
        }
        Ok(MetricSpec {
            chart,
            components,
            signature,
            killing: None,
        })
    }

    pub fn with_killing(mut self, killing: KillingSpec) -> Result<Self> {
        if killing.components.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Killing field has {} components, chart has {}",
                killing.components.len(),
                self.dim()
            )));
        }
        self.killing = Some(killing);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn coords(&self) -> &[String] {
        &self.chart.coords
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[packed(self.dim(), i, j)]
    }

    /// Serialise back to the spec file format. Output is deterministic.
    pub fn to_spec_string(&self) -> String {
        let n = self.dim();
        let coords = self.coords();
        let mut out = String::new();
        let quoted: Vec<String> = coords.iter().map(|c| format!("\"{c}\"")).collect();
        let _ = writeln!(out, "[chart]");
        let _ = writeln!(out, "coordinates = [{}]", quoted.join(", "));
        let intervals: Vec<String> = self
            .chart
            .intervals
            .iter()
            .map(|(lo, hi)| format!("[{lo:?}, {hi:?}]"))
            .collect();
        let _ = writeln!(out, "intervals = [{}]", intervals.join(", "));
        let _ = writeln!(out, "margin = {:?}", self.chart.margin);
        let _ = writeln!(out, "\n[metric]");
        for i in 0..n {
            for j in i..n {
                let e = self.component(i, j);
                if !e.is_zero() {
                    let _ = writeln!(out, "g_{i}_{j} = \"{}\"", e.to_text(coords));
                }
            }
        }
        let _ = writeln!(out, "\n[signature]");
        let _ = writeln!(out, "type = \"{}\"", self.signature.name());
        if let Some(k) = &self.killing {
            let _ = writeln!(out, "\n[killing]");
            for (i, e) in k.components.iter().enumerate() {
                if !e.is_zero() {
                    let _ = writeln!(out, "T_{i} = \"{}\"", e.to_text(coords));
                }
            }
            let _ = writeln!(out, "unit = {}", k.unit);
        }
        out
    }
}

fn validate_chart(chart: &Chart) -> Result<()> {
    let n = chart.dim();
    if !(2..=MAX_DIMENSION).contains(&n) {
        return Err(Error::DimensionMismatch(format!(
            "dimension {n} outside 2..={MAX_DIMENSION}"
        )));
    }
    if chart.intervals.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} intervals for {n} coordinates",
            chart.intervals.len()
        )));
    }
    for (i, name) in chart.coords.iter().enumerate() {
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || name == "pi" || Func::from_name(name).is_some() {
            return Err(Error::Format(format!("invalid coordinate name '{name}'")));
        }
        if chart.coords[..i].contains(name) {
            return Err(Error::Format(format!("duplicate coordinate '{name}'")));
        }
    }
    if !(chart.margin > 0.0 && chart.margin.is_finite()) {
        return Err(Error::Format(format!(
            "chart margin {} must be positive",
            chart.margin
        )));
    }
    for ((lo, hi), name) in chart.intervals.iter().zip(&chart.coords) {
        if !(lo.is_finite() && hi.is_finite() && hi - lo > 2.0 * chart.margin) {
            return Err(Error::Format(format!(
                "interval ({lo}, {hi}) for '{name}' is empty after the margin"
            )));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartSection {
    coordinates: Vec<String>,
    intervals: Vec<[Bound; 2]>,
    margin: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureSection {
    #[serde(rename = "type")]
    tag: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    chart: ChartSection,
    metric: BTreeMap<String, String>,
    signature: SignatureSection,
    killing: Option<BTreeMap<String, toml::Value>>,
}

fn bound_value(b: &Bound) -> Result<f64> {
    match b {
        Bound::Number(v) => Ok(*v),
        Bound::Text(s) => Ok(parse_expression(s, &[])?.eval(&[], &[])?),
    }
}

/// Parse `<prefix>_<i>[_<j>]` index suffixes.
fn indices(key: &str, prefix: &str, count: usize) -> Option<Vec<usize>> {
    let rest = key.strip_prefix(prefix)?.strip_prefix('_')?;
    let parts: Vec<&str> = rest.split('_').collect();
    if parts.len() != count {
        return None;
    }
    parts
        .iter()
        .map(|p| {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                None
            } else {
                p.parse().ok()
            }
        })
        .collect()
}

/// Load a spec from file bytes.
pub fn load_spec(bytes: &[u8]) -> Result<MetricSpec> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Format(format!("not UTF-8: {e}")))?;
    let file: SpecFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;

    let n = file.chart.coordinates.len();
    let intervals = file
        .chart
        .intervals
        .iter()
        .map(|[lo, hi]| Ok((bound_value(lo)?, bound_value(hi)?)))
        .collect::<Result<Vec<_>>>()?;
    let chart = Chart {
        coords: file.chart.coordinates,
        intervals,
        margin: file.chart.margin.unwrap_or(DEFAULT_CHART_MARGIN),
    };
    validate_chart(&chart)?;
    let signature = Signature::parse(&file.signature.tag)?;

    let mut entries: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for (key, text) in &file.metric {
        let Some(ij) = indices(key, "g", 2) else {
            return Err(Error::Format(format!("unrecognised metric key '{key}'")));
        };
        let (i, j) = (ij[0], ij[1]);
        if i >= n || j >= n {
            return Err(Error::DimensionMismatch(format!(
                "metric entry {key} outside dimension {n}"
            )));
        }
        if i > j {
            return Err(Error::Format(format!(
                "metric entry {key} is below the diagonal; write g_{j}_{i} only"
            )));
        }
        entries.insert((i, j), parse_expression(text, &chart.coords)?);
    }
    let spec = MetricSpec::new(chart, signature, |i, j| {
        entries.get(&(i, j)).cloned().unwrap_or_else(Expr::zero)
    })?;

    let Some(section) = file.killing else {
        return Ok(spec);
    };
    let mut components = vec![Expr::zero(); n];
    let mut unit = false;
    for (key, value) in &section {
        if key == "unit" {
            unit = value
                .as_bool()
                .ok_or_else(|| Error::Format("killing.unit must be true or false".into()))?;
            continue;
        }
        let Some(i) = indices(key, "T", 1).map(|v| v[0]) else {
            return Err(Error::Format(format!("unrecognised killing key '{key}'")));
        };
        if i >= n {
            return Err(Error::DimensionMismatch(format!(
                "Killing component {key} outside dimension {n}"
            )));
        }
        let text = value
            .as_str()
            .ok_or_else(|| Error::Format(format!("killing.{key} must be a string expression")))?;
        components[i] = parse_expression(text, spec.coords())?;
    }
    spec.with_killing(KillingSpec { components, unit })
}
