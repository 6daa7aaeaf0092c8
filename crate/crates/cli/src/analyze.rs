use serde::Serialize;

use statcurv::topology::{grid_scan, strongest, ScanResult, VerdictReport};

use crate::{
    fmt_point, load_structure, to_json, unit_structure, CliError, Format, Outcome, PChoice,
    RunConfig, EXIT_NEGATIVE, EXIT_OK,
};

pub const SAMPLING_CAVEAT: &str =
    "a grid verdict is evidence from finitely many points, not a proof that positivity holds everywhere";

/// Quantiles (min, 25%, median, 75%, max) of the smallest eigenvalue per point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

fn smallest_eigenvalue_quantiles(scan: &ScanResult) -> Option<Quantiles> {
    let mut v: Vec<f64> = scan
        .reports
        .iter()
        .filter_map(|r| r.eigenvalues.first().copied())
        .collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let at = |q: f64| v[((v.len() - 1) as f64 * q).round() as usize];
    Some(Quantiles {
        min: v[0],
        q25: at(0.25),
        median: at(0.5),
        q75: at(0.75),
        max: v[v.len() - 1],
    })
}

#[derive(Debug, Clone, Serialize)]
struct AnalyzeReport {
    schema: &'static str,
    spec: String,
    notice: Option<String>,
    caveat: &'static str,
    verdict: VerdictReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    all_p: Vec<VerdictReport>,
    smallest_eigenvalue_quantiles: Option<Quantiles>,
}

/// Scan the symmetrized operator and report the Betti-number verdict.
pub fn cmd_analyze(config: &RunConfig) -> Result<Outcome, CliError> {
    let tol = config.tolerances()?;
    let raw = load_structure(&config.spec_path)?;
    let (unit, notice) = unit_structure(&raw)?;
    let grid = config.grid_for(unit.dim())?;
    if let PChoice::One(p) = config.p {
        // reject a bad p before the scan
        statcurv::topology::betti_conclusions(unit.dim(), p, false)?;
    }
    let scan = grid_scan(&unit, &grid, &tol)?;
    render_analysis(config, &scan, notice)
}

/// Format a finished scan; separated from the scan so synthetic operator
/// sources can be reported the same way.
pub fn render_analysis(
    config: &RunConfig,
    scan: &ScanResult,
    notice: Option<String>,
) -> Result<Outcome, CliError> {
    let (verdict, all_p) = match config.p {
        PChoice::One(p) => (scan.verdict(p)?, Vec::new()),
        PChoice::All => {
            let all = scan.all_verdicts()?;
            let best = strongest(&all).cloned().ok_or_else(|| {
                CliError::Input(format!("no admissible p for dimension {}", scan.dimension))
            })?;
            (best, all)
        }
    };
    let report = AnalyzeReport {
        schema: "statcurv.analyze/1",
        spec: config.spec_path.display().to_string(),
        notice: notice.clone(),
        caveat: SAMPLING_CAVEAT,
        verdict,
        all_p,
        smallest_eigenvalue_quantiles: smallest_eigenvalue_quantiles(scan),
    };
    let positive = report.verdict.holds_everywhere && !report.verdict.contradiction;
    let text = match config.format {
        Format::Json => to_json(&report),
        Format::Text => render_text(&report),
    };
    Ok(Outcome {
        exit_code: if positive { EXIT_OK } else { EXIT_NEGATIVE },
        report: text,
        notices: notice.into_iter().collect(),
    })
}

/// One-line summary such as `2-positive everywhere (margin 2.000000); b1=b2=0`.
pub fn verdict_line(v: &VerdictReport) -> String {
    let Some(margin) = v.min_margin else {
        return format!("no grid points; no {}-positivity conclusion", v.k);
    };
    // avoid printing -0.000000
    let margin = margin + 0.0;
    if !v.holds_everywhere {
        return format!("not {}-positive (margin {margin:.6}); no conclusion", v.k);
    }
    let head = format!("{}-positive everywhere (margin {margin:.6})", v.k);
    if v.contradiction {
        return format!("{head}; contradiction: {}", v.reason);
    }
    let mut line = head;
    if !v.vanishing_betti.is_empty() {
        let names: Vec<String> = v.vanishing_betti.iter().map(|i| format!("b{i}")).collect();
        line.push_str(&format!("; {}=0", names.join("=")));
    }
    if let Some(b) = v.middle_betti {
        line.push_str(&format!("; b{}={b}", v.dimension / 2));
    }
    line
}

fn render_text(r: &AnalyzeReport) -> String {
    let v = &r.verdict;
    let sizes: Vec<String> = v.grid.iter().map(|s| s.to_string()).collect();
    let mut out = String::new();
    out.push_str(&format!("spec: {}\n", r.spec));
    out.push_str(&format!(
        "grid: {} ({} points)\n",
        sizes.join("x"),
        v.points
    ));
    if let Some(n) = &r.notice {
        out.push_str(n);
        out.push('\n');
    }
    for other in &r.all_p {
        out.push_str(&format!("p={}: {}\n", other.p, verdict_line(other)));
    }
    let label = if r.all_p.is_empty() {
        ""
    } else {
        "strongest: "
    };
    out.push_str(&format!("{label}p={}: {}\n", v.p, verdict_line(v)));
    if let Some(p) = &v.argmin_point {
        out.push_str(&format!("argmin point: {}\n", fmt_point(p)));
    }
    if let Some(q) = &r.smallest_eigenvalue_quantiles {
        out.push_str(&format!(
            "smallest eigenvalue quantiles: min {:.6} q25 {:.6} median {:.6} q75 {:.6} max {:.6}\n",
            q.min, q.q25, q.median, q.q75, q.max
        ));
    }
    out.push_str(&format!(
        "max identity residual: {:.3e}\n",
        v.max_identity_residual
    ));
    out.push_str(&format!("caveat: {}\n", r.caveat));
    out
}
