use rayon::prelude::*;
use serde::Serialize;

use statcurv::curv_op::{riemannian_operator_at, symmetrized_at};
use statcurv::frames::{
    adapted_frame_at, pairing_residual, squared_nabla_t_at, stationary_frame_at,
};
use statcurv::linalg::Mat;
use statcurv::stationary::StationaryPoint;
use statcurv::tolerance::Tolerances;

use crate::{
    fmt_point, grid_label, load_structure, to_json, unit_structure, CliError, Format, Outcome,
    RunConfig, EXIT_NUMERICAL, EXIT_OK,
};

/// Identity classes checked at every grid point, with unscaled tolerances.
const CHECKS: [(&str, f64); 18] = [
    ("connection.t_t", 1e-7),
    ("connection.x_t", 1e-7),
    ("connection.x_x", 1e-7),
    ("connection.t_x", 1e-7),
    ("curvature.mixed", 1e-6),
    ("curvature.time_time", 1e-6),
    ("curvature.spatial", 1e-6),
    ("riemann_g.antisymmetry", 1e-8),
    ("riemann_g.pair_symmetry", 1e-8),
    ("riemann_g.bianchi", 1e-8),
    ("riemann_l.antisymmetry", 1e-8),
    ("riemann_l.pair_symmetry", 1e-8),
    ("riemann_l.bianchi", 1e-8),
    ("metric.inverse", 1e-10),
    ("killing.defect", 1e-10),
    ("nabla_t_squared.max_eigenvalue", 1e-9),
    ("adapted_frame.pairing", 1e-7),
    ("operator.central_identity", 1e-7),
];

/// Riemannian-operator symmetry is checked with the same tolerance as the
/// tensor symmetries.
const OPERATOR_SYMMETRY: (&str, f64) = ("operator.riemannian_symmetry", 1e-8);

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyReport {
    schema: &'static str,
    spec: String,
    grid: Vec<usize>,
    points: usize,
    notice: Option<String>,
    checks: Vec<CheckSummary>,
    pass: bool,
}

fn inverse_residual(g: &Mat, g_inv: &Mat) -> f64 {
    g.matmul(g_inv).max_abs_diff(&Mat::identity(g.rows()))
}

/// Residuals in the order of `CHECKS` followed by the operator symmetry.
fn point_residuals(
    raw: &StationaryPoint,
    unit: &StationaryPoint,
    tol: &Tolerances,
) -> statcurv::Result<Vec<f64>> {
    let frame = stationary_frame_at(raw)?;
    let conn = raw.connection_residuals(&frame);
    let curv = raw.curvature_residuals(&frame)?;
    let rg = raw
        .riemann_g()
        .frame_components(&frame.vectors)?
        .symmetry_residuals();
    let rl = raw
        .riemann_l()
        .frame_components(&frame.vectors)?
        .symmetry_residuals();
    let inverse = inverse_residual(&raw.lorentzian.g, &raw.lorentzian.g_inv)
        .max(inverse_residual(&raw.riemannian.g, &raw.riemannian.g_inv));

    let squared = squared_nabla_t_at(unit, tol)?;
    let top = squared.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let adapted = adapted_frame_at(unit, tol)?;
    let riem = riemannian_operator_at(unit, &adapted)?;
    let sym = symmetrized_at(unit, &adapted, tol)?;
    Ok(vec![
        conn.t_t,
        conn.x_t,
        conn.x_x,
        conn.t_x,
        curv.mixed,
        curv.time_time,
        curv.spatial,
        rg.antisymmetry,
        rg.pair_symmetry,
        rg.bianchi,
        rl.antisymmetry,
        rl.pair_symmetry,
        rl.bianchi,
        inverse,
        raw.killing_defect(),
        top,
        pairing_residual(unit, &adapted),
        riem.entries.max_abs_diff(&sym.entries),
        riem.entries.asymmetry(),
    ])
}

/// Run every pointwise identity over the grid and report the worst residual
/// of each class.
pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let tol = config.tolerances()?;
    let raw = load_structure(&config.spec_path)?;
    let (unit, notice) = unit_structure(&raw)?;
    let grid = config.grid_for(raw.dim())?;
    let points = grid.points(&raw.lorentzian().chart)?;

    let per_point: Vec<statcurv::Result<Vec<f64>>> = points
        .par_iter()
        .map(|p| {
            let inner = || {
                let raw_point = raw.at(p)?;
                let unit_point = unit.at(p)?;
                point_residuals(&raw_point, &unit_point, &tol)
            };
            inner().map_err(|e| e.at(p))
        })
        .collect();

    let all_checks: Vec<(&'static str, f64)> =
        CHECKS.iter().copied().chain([OPERATOR_SYMMETRY]).collect();
    let mut summaries: Vec<CheckSummary> = all_checks
        .iter()
        .map(|&(name, t)| CheckSummary {
            name,
            max_residual: 0.0,
            tolerance: tol.of(t),
            pass: true,
            worst_point: None,
        })
        .collect();
    for (p, r) in points.iter().zip(per_point) {
        let residuals = r.map_err(CliError::Numerical)?;
        for (s, v) in summaries.iter_mut().zip(residuals) {
            if s.worst_point.is_none() || v > s.max_residual {
                s.max_residual = v;
                s.worst_point = Some(p.clone());
            }
        }
    }
    for s in &mut summaries {
        s.pass = s.max_residual <= s.tolerance;
    }
    let pass = summaries.iter().all(|s| s.pass);
    let report = VerifyReport {
        schema: "statcurv.verify/1",
        spec: config.spec_path.display().to_string(),
        grid: grid.sizes.clone(),
        points: points.len(),
        notice: notice.clone(),
        checks: summaries,
        pass,
    };
    let text = match config.format {
        Format::Json => to_json(&report),
        Format::Text => render_text(&report, &grid),
    };
    Ok(Outcome {
        exit_code: if pass { EXIT_OK } else { EXIT_NUMERICAL },
        report: text,
        notices: notice.into_iter().collect(),
    })
}

fn render_text(report: &VerifyReport, grid: &statcurv::topology::Grid) -> String {
    let mut out = String::new();
    out.push_str(&format!("spec: {}\n", report.spec));
    out.push_str(&format!("grid: {}\n", grid_label(grid)));
    if let Some(n) = &report.notice {
        out.push_str(n);
        out.push('\n');
    }
    out.push_str(&format!(
        "{:<32} {:>12} {:>12}  {}\n",
        "identity", "max residual", "tolerance", "status"
    ));
    for c in &report.checks {
        out.push_str(&format!(
            "{:<32} {:>12.3e} {:>12.3e}  {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        ));
        if let (false, Some(p)) = (c.pass, &c.worst_point) {
            out.push_str(&format!(" at {}", fmt_point(p)));
        }
        out.push('\n');
    }
    out.push_str(if report.pass {
        "all identities hold\n"
    } else {
        "identity check failed\n"
    });
    out
}
