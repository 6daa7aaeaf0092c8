use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use statcurv::curv_op::{
    lorentzian_operator_at, riemannian_operator_at, symmetrized_at, CurvatureOperatorMatrix,
};
use statcurv::frames::adapted_frame_at;
use statcurv::linalg::jacobi_eigen;

use crate::{load_structure, unit_structure, CliError, Outcome, RunConfig, EXIT_OK};

/// One grid point of an export, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportLine {
    pub index: usize,
    pub point: Vec<f64>,
    pub basis: Vec<String>,
    pub f_values: Vec<f64>,
    pub riemannian: Vec<Vec<f64>>,
    pub lorentzian: Vec<Vec<f64>>,
    pub symmetrized: Vec<Vec<f64>>,
    pub riemannian_eigenvalues: Vec<f64>,
    pub symmetrized_eigenvalues: Vec<f64>,
}

fn rows(m: &CurvatureOperatorMatrix) -> Vec<Vec<f64>> {
    m.entries.to_rows()
}

/// Per-point operator matrices of all three flavors as JSON lines.
pub fn cmd_export(config: &RunConfig) -> Result<Outcome, CliError> {
    let tol = config.tolerances()?;
    let raw = load_structure(&config.spec_path)?;
    let (unit, notice) = unit_structure(&raw)?;
    let grid = config.grid_for(unit.dim())?;
    let points = grid.points(&unit.lorentzian().chart)?;

    let lines: Vec<statcurv::Result<ExportLine>> = points
        .into_par_iter()
        .enumerate()
        .map(|(index, p)| {
            let inner = || {
                let sp = unit.at(&p)?;
                let frame = adapted_frame_at(&sp, &tol)?;
                let r = riemannian_operator_at(&sp, &frame)?;
                let l = lorentzian_operator_at(&sp, &frame)?;
                let s = symmetrized_at(&sp, &frame, &tol)?;
                Ok(ExportLine {
                    index,
                    point: p.clone(),
                    basis: r.basis.labels(),
                    f_values: frame.f_values(),
                    riemannian_eigenvalues: jacobi_eigen(&r.entries).values,
                    symmetrized_eigenvalues: jacobi_eigen(&s.entries).values,
                    riemannian: rows(&r),
                    lorentzian: rows(&l),
                    symmetrized: rows(&s),
                })
            };
            inner().map_err(|e: statcurv::Error| e.at(&p))
        })
        .collect();
    let mut report = String::new();
    for line in lines {
        let line = line.map_err(CliError::Numerical)?;
        report.push_str(&serde_json::to_string(&line).expect("export lines serialize"));
        report.push('\n');
    }
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        notices: notice.into_iter().collect(),
    })
}
