//! k-positivity of curvature-operator spectra, Betti-number conclusions from
//! `(n−p)`-positivity, and grid scans over a chart.

use rayon::prelude::*;
use serde::Serialize;

use crate::curv_op::{riemannian_operator_at, symmetrized_at, CurvatureOperatorMatrix};
use crate::error::{Error, Result};
use crate::frames::adapted_frame_at;
use crate::linalg::jacobi_eigen;
use crate::metric::Chart;
use crate::stationary::StationaryStructure;
use crate::tolerance::Tolerances;

/// A partial sum counts as positive only above this threshold.
pub const POSITIVITY_THRESHOLD: f64 = 1e-10;

/// Version tag carried by every JSON verdict.
pub const VERDICT_SCHEMA: &str = "statcurv.verdict/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub point: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `partial_sums[k-1]` is the sum of the `k` smallest eigenvalues.
    pub partial_sums: Vec<f64>,
    pub k_positive: Vec<bool>,
}

impl PositivityReport {
    pub fn from_eigenvalues(point: Vec<f64>, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let partial_sums: Vec<f64> = eigenvalues
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        let k_positive = partial_sums
            .iter()
            .map(|&s| s > POSITIVITY_THRESHOLD)
            .collect();
        PositivityReport {
            point,
            eigenvalues,
            partial_sums,
            k_positive,
        }
    }

    pub fn for_matrix(point: Vec<f64>, m: &CurvatureOperatorMatrix) -> Result<Self> {
        require_symmetric(m)?;
        Ok(Self::from_eigenvalues(
            point,
            jacobi_eigen(&m.entries).values,
        ))
    }

    /// Sum of the `k` smallest eigenvalues, `1 ≤ k ≤ N`.
    pub fn sum(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.partial_sums.len() {
            return Err(Error::KOutOfRange {
                k,
                max: self.partial_sums.len(),
            });
        }
        Ok(self.partial_sums[k - 1])
    }
}

fn require_symmetric(m: &CurvatureOperatorMatrix) -> Result<()> {
    if !m.flavor.is_symmetric() {
        return Err(Error::NonSymmetric(
            format!("{:?} operator", m.flavor).to_lowercase(),
        ));
    }
    Ok(())
}

/// Sum of the `k` smallest eigenvalues and whether it is positive.
pub fn k_positivity(m: &CurvatureOperatorMatrix, k: usize) -> Result<(f64, bool)> {
    let report = PositivityReport::for_matrix(Vec::new(), m)?;
    let sum = report.sum(k)?;
    Ok((sum, sum > POSITIVITY_THRESHOLD))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVerdict {
    pub dimension: usize,
    pub p: usize,
    pub holds_everywhere: bool,
    pub vanishing: Vec<usize>,
    pub middle_betti: Option<i64>,
    pub contradiction: bool,
    pub reason: String,
}

pub const CONTRADICTION_REASON: &str = "no closed stationary Lorentzian manifold can satisfy this: \
     the input is not realizable as a closed stationary spacetime or the numerical hypothesis is violated";

/// Admissible `p` for dimension `n`: `1 ≤ p ≤ ⌊n/2⌋`, `n ≥ 3`.
pub fn admissible_p(n: usize) -> std::ops::RangeInclusive<usize> {
    1..=n / 2
}

/// Conclusions forced by `(n−p)`-positivity of the curvature operator on a
/// closed stationary manifold of dimension `n`.
///
/// Positivity kills `b_1..b_p` and, by duality, `b_{n−p}..b_{n−1}`. In even
/// dimension `n = 2m` the Euler characteristic vanishes, which either pins
/// the middle Betti number (`p = m−1`) or is impossible.
pub fn betti_conclusions(n: usize, p: usize, holds_everywhere: bool) -> Result<BettiVerdict> {
    if n < 3 || !admissible_p(n).contains(&p) {
        return Err(Error::POutOfRange { n, p });
    }
    let mut verdict = BettiVerdict {
        dimension: n,
        p,
        holds_everywhere,
        vanishing: Vec::new(),
        middle_betti: None,
        contradiction: false,
        reason: String::new(),
    };
    if !holds_everywhere {
        verdict.reason = format!("not {}-positive everywhere; no conclusion", n - p);
        return Ok(verdict);
    }
    let vanishing: Vec<usize> = (1..=p).chain(n - p..n).collect();
    if n % 2 == 1 {
        verdict.vanishing = vanishing;
        verdict.reason = format!("{}-positive everywhere", n - p);
        return Ok(verdict);
    }
    let m = n / 2;
    // For p ≥ m−1 only b_0, b_n and possibly b_m survive: χ = 2 + (−1)^m b_m.
    if p + 1 >= m {
        let sign: i64 = if m.is_multiple_of(2) { 1 } else { -1 };
        let middle = if p == m { None } else { Some(-2 * sign) };
        match middle {
            Some(b) if b >= 0 => {
                verdict.vanishing = vanishing;
                verdict.middle_betti = Some(b);
                verdict.reason =
                    format!("{}-positive everywhere; Euler characteristic zero", n - p);
            }
            _ => {
                verdict.contradiction = true;
                verdict.reason = CONTRADICTION_REASON.to_string();
            }
        }
        return Ok(verdict);
    }
    verdict.vanishing = vanishing;
    verdict.reason = format!("{}-positive everywhere", n - p);
    Ok(verdict)
}

/// Points per coordinate over the chart interior. A size of `0` in any
/// coordinate yields an empty grid; sizes of `1` are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub sizes: Vec<usize>,
}

impl Grid {
    pub fn uniform(n: usize, size: usize) -> Self {
        Grid {
            sizes: vec![size; n],
        }
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order (last coordinate fastest), endpoints of the
    /// interior box included.
    pub fn points(&self, chart: &Chart) -> Result<Vec<Vec<f64>>> {
        if self.sizes.len() != chart.dim() {
            return Err(Error::Grid(format!(
                "grid has {} sizes, chart has {} coordinates",
                self.sizes.len(),
                chart.dim()
            )));
        }
        if let Some(i) = self.sizes.iter().position(|&s| s == 1) {
            return Err(Error::Grid(format!(
                "grid size for '{}' must be 0 or at least 2",
                chart.coords[i]
            )));
        }
        let axes: Vec<Vec<f64>> = chart
            .interior_box()
            .iter()
            .zip(&self.sizes)
            .map(|(&(a, b), &s)| {
                (0..s)
                    .map(|i| {
                        if i + 1 == s {
                            b
                        } else {
                            a + (b - a) * i as f64 / (s - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut p = vec![0.0; axes.len()];
            for (c, axis) in axes.iter().enumerate().rev() {
                p[c] = axis[idx % axis.len()];
                idx /= axis.len();
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Per-point symmetric operator plus a health residual, so scans can run
/// over synthetic operators as well as geometric ones.
pub trait OperatorSource: Sync {
    fn dim(&self) -> usize;
    fn operator_at(&self, point: &[f64]) -> Result<(CurvatureOperatorMatrix, f64)>;
}

/// Symmetrized operator in the adapted frame, with the entrywise distance
/// to the Riemannian operator as residual.
pub struct GeometricSource<'a> {
    pub structure: &'a StationaryStructure,
    pub tolerances: Tolerances,
}

impl OperatorSource for GeometricSource<'_> {
    fn dim(&self) -> usize {
        self.structure.dim()
    }

    fn operator_at(&self, point: &[f64]) -> Result<(CurvatureOperatorMatrix, f64)> {
        let inner = || -> Result<(CurvatureOperatorMatrix, f64)> {
            let sp = self.structure.at(point)?;
            let frame = adapted_frame_at(&sp, &self.tolerances)?;
            let sym = symmetrized_at(&sp, &frame, &self.tolerances)?;
            let riem = riemannian_operator_at(&sp, &frame)?;
            let residual = sym.entries.max_abs_diff(&riem.entries);
            Ok((sym, residual))
        };
        inner().map_err(|e| e.at(point))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub dimension: usize,
    pub grid: Vec<usize>,
    pub reports: Vec<PositivityReport>,
    pub max_identity_residual: f64,
}

impl ScanResult {
    /// Smallest `k`-partial sum over the grid and the first point attaining it.
    pub fn min_margin(&self, k: usize) -> Result<Option<(f64, Vec<f64>)>> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for r in &self.reports {
            let s = r.sum(k)?;
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, r.point.clone()));
            }
        }
        Ok(best)
    }

    pub fn verdict(&self, p: usize) -> Result<VerdictReport> {
        let n = self.dimension;
        if n < 3 || !admissible_p(n).contains(&p) {
            return Err(Error::POutOfRange { n, p });
        }
        let k = n - p;
        let margin = self.min_margin(k)?;
        let holds = margin
            .as_ref()
            .is_some_and(|(m, _)| *m > POSITIVITY_THRESHOLD);
        let betti = betti_conclusions(n, p, holds)?;
        let (min_margin, argmin_point) = match margin {
            Some((m, pt)) => (Some(m), Some(pt)),
            None => (None, None),
        };
        Ok(VerdictReport {
            schema: VERDICT_SCHEMA,
            dimension: n,
            p,
            k,
            big_n: n * (n - 1) / 2,
            grid: self.grid.clone(),
            points: self.reports.len(),
            min_margin,
            argmin_point,
            holds_everywhere: holds,
            vanishing_betti: betti.vanishing,
            middle_betti: betti.middle_betti,
            contradiction: betti.contradiction,
            reason: betti.reason,
            max_identity_residual: self.max_identity_residual,
        })
    }

    /// Verdicts for every admissible `p`, ascending.
    pub fn all_verdicts(&self) -> Result<Vec<VerdictReport>> {
        admissible_p(self.dimension)
            .map(|p| self.verdict(p))
            .collect()
    }
}

/// Strongest verdict among several: any contradiction first, otherwise the
/// largest `p` that holds, otherwise the smallest `p`.
pub fn strongest(verdicts: &[VerdictReport]) -> Option<&VerdictReport> {
    verdicts
        .iter()
        .find(|v| v.contradiction)
        .or_else(|| verdicts.iter().rev().find(|v| v.holds_everywhere))
        .or_else(|| verdicts.first())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub schema: &'static str,
    pub dimension: usize,
    pub p: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub grid: Vec<usize>,
    pub points: usize,
    pub min_margin: Option<f64>,
    pub argmin_point: Option<Vec<f64>>,
    pub holds_everywhere: bool,
    pub vanishing_betti: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middle_betti: Option<i64>,
    pub contradiction: bool,
    pub reason: String,
    pub max_identity_residual: f64,
}

/// Evaluate `source` at every point of the grid. Results are kept in grid
/// order regardless of scheduling; the first failing point (in grid order)
/// aborts the scan.
pub fn grid_scan_with(
    source: &dyn OperatorSource,
    grid: &Grid,
    points: Vec<Vec<f64>>,
) -> Result<ScanResult> {
    let evaluated: Vec<Result<(PositivityReport, f64)>> = points
        .into_par_iter()
        .map(|p| {
            let (m, residual) = source.operator_at(&p)?;
            let report = PositivityReport::for_matrix(p.clone(), &m).map_err(|e| e.at(&p))?;
            Ok((report, residual))
        })
        .collect();
    let mut reports = Vec::with_capacity(evaluated.len());
    let mut max_identity_residual: f64 = 0.0;
    for r in evaluated {
        let (report, residual) = r?;
        max_identity_residual = max_identity_residual.max(residual);
        reports.push(report);
    }
    Ok(ScanResult {
        dimension: source.dim(),
        grid: grid.sizes.clone(),
        reports,
        max_identity_residual,
    })
}

/// Scan the symmetrized operator of a unit stationary structure.
pub fn grid_scan(s: &StationaryStructure, grid: &Grid, tol: &Tolerances) -> Result<ScanResult> {
    let points = grid.points(&s.lorentzian().chart)?;
    let source = GeometricSource {
        structure: s,
        tolerances: *tol,
    };
    grid_scan_with(&source, grid, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curv_op::{Flavor, Lambda2Basis};
    use crate::linalg::Mat;

    fn op(entries: Mat, flavor: Flavor) -> CurvatureOperatorMatrix {
        CurvatureOperatorMatrix {
            basis: Lambda2Basis::new(3),
            entries,
            flavor,
            f_values: Vec::new(),
        }
    }

    #[test]
    fn k_positivity_examples() {
        let id = op(Mat::identity(3), Flavor::Riemannian);
        assert_eq!(k_positivity(&id, 2).unwrap(), (2.0, true));
        let zero = op(Mat::zeros(3, 3), Flavor::Symmetrized);
        for k in 1..=3 {
            assert_eq!(k_positivity(&zero, k).unwrap(), (0.0, false));
        }
        let d = op(Mat::diag(&[-1.0, 0.6, 0.6]), Flavor::Riemannian);
        let (s2, p2) = k_positivity(&d, 2).unwrap();
        assert!((s2 + 0.4).abs() < 1e-15 && !p2);
        assert_eq!(k_positivity(&d, 1).unwrap(), (-1.0, false));
        assert!(matches!(
            k_positivity(&d, 4),
            Err(Error::KOutOfRange { .. })
        ));
        let l = op(Mat::identity(3), Flavor::Lorentzian);
        assert!(matches!(k_positivity(&l, 1), Err(Error::NonSymmetric(_))));
    }

    #[test]
    fn grid_points_layout() {
        let chart = Chart {
            coords: vec!["a".into(), "b".into()],
            intervals: vec![(0.0, 1.0), (0.0, 2.0)],
            margin: 0.0,
        };
        let pts = Grid { sizes: vec![2, 3] }.points(&chart).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 0.0]);
        assert_eq!(pts[1], vec![0.0, 1.0]);
        assert_eq!(pts[5], vec![1.0, 2.0]);
        assert!(Grid { sizes: vec![0, 3] }
            .points(&chart)
            .unwrap()
            .is_empty());
        assert!(Grid { sizes: vec![1, 3] }.points(&chart).is_err());
        assert!(Grid { sizes: vec![3] }.points(&chart).is_err());
    }

    #[test]
    fn betti_examples() {
        let v = betti_conclusions(3, 1, true).unwrap();
        assert_eq!(v.vanishing, vec![1, 2]);
        assert!(!v.contradiction);
        assert!(betti_conclusions(4, 1, true).unwrap().contradiction);
        assert!(betti_conclusions(4, 2, true).unwrap().contradiction);
        let v = betti_conclusions(6, 2, true).unwrap();
        assert_eq!(v.vanishing, vec![1, 2, 4, 5]);
        assert_eq!(v.middle_betti, Some(2));
        assert!(betti_conclusions(6, 3, true).unwrap().contradiction);
        assert!(betti_conclusions(3, 2, true).is_err());
        assert!(betti_conclusions(2, 1, true).is_err());
        let none = betti_conclusions(5, 2, false).unwrap();
        assert!(none.vanishing.is_empty() && !none.contradiction);
    }
}
