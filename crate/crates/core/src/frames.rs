//! Orthonormal frames containing the Killing field, and the adapted frame
//! in which `∇^L T` acts by 2×2 rotation blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, jacobi_eigen, Mat};
use crate::stationary::{StationaryPoint, StationaryStructure};
use crate::tolerance::Tolerances;

/// `∇^L_{X_first} T = f X_second` and `∇^L_{X_second} T = −f X_first`, `f < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePair {
    pub first: usize,
    pub second: usize,
    pub f: f64,
}

/// Frame `E_0 = T/|T|, E_1..E_{n-1}` in coordinate components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthonormalFrame {
    pub point: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub pairs: Vec<FramePair>,
    /// Spatial indices `j` with `∇^L_{X_j} T = 0`.
    pub fixed: Vec<usize>,
}

impl OrthonormalFrame {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn f_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.f).collect()
    }

    /// Gram matrix of the frame under a metric.
    pub fn gram(&self, metric: &Mat) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |a, b| {
            crate::linalg::bilinear(metric, &self.vectors[a], &self.vectors[b])
        })
    }

    /// The matrix `P[j][i]` that `∇^L_{E_i} T` would have in a perfectly
    /// adapted frame.
    pub fn pairing_pattern(&self) -> Mat {
        let n = self.dim();
        let mut p = Mat::zeros(n, n);
        for pair in &self.pairs {
            p[(pair.second, pair.first)] = pair.f;
            p[(pair.first, pair.second)] = -pair.f;
        }
        p
    }
}

/// Gram–Schmidt against `g` starting from `T/|T|` and the coordinate basis.
fn complete(sp: &StationaryPoint) -> Result<OrthonormalFrame> {
    let n = sp.dim();
    let t = &sp.killing;
    let scale = (-sp.norm).sqrt();
    let mut vectors = vec![t.iter().map(|x| x / scale).collect::<Vec<f64>>()];
    // Candidate residuals are compared against the coordinate vector's own
    // length so that nearly dependent seeds are skipped, not amplified.
    for k in 0..n {
        if vectors.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        let original = sp.g(&v, &v).sqrt();
        for e in &vectors {
            let c = sp.g(&v, e);
            for (x, y) in v.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        // second pass for numerical orthogonality
        for e in &vectors {
            let c = sp.g(&v, e);
            for (x, y) in v.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        let len = sp.g(&v, &v).max(0.0).sqrt();
        if len > 1e-6 * original {
            vectors.push(v.iter().map(|x| x / len).collect());
        }
    }
    if vectors.len() != n {
        return Err(Error::DegenerateFrame);
    }
    Ok(OrthonormalFrame {
        point: sp.point.clone(),
        vectors,
        pairs: Vec::new(),
        fixed: Vec::new(),
    })
}

fn check_unit(sp: &StationaryPoint, tol: &Tolerances) -> Result<()> {
    if (sp.norm + 1.0).abs() > tol.of(1e-8) {
        return Err(Error::NotUnit { norm: sp.norm });
    }
    Ok(())
}

/// Frame `{T/|T|, X_1, ..}` for any timelike Killing field; no adapted
/// structure is claimed.
pub fn stationary_frame_at(sp: &StationaryPoint) -> Result<OrthonormalFrame> {
    complete(sp)
}

pub fn orthonormal_completion_at(
    sp: &StationaryPoint,
    tol: &Tolerances,
) -> Result<OrthonormalFrame> {
    check_unit(sp, tol)?;
    complete(sp)
}

/// Orthonormal frame `{T, X_1, ..}` for a unit Killing field.
pub fn orthonormal_completion(s: &StationaryStructure, point: &[f64]) -> Result<OrthonormalFrame> {
    let sp = s.at(point)?;
    orthonormal_completion_at(&sp, &Tolerances::default()).map_err(|e| e.at(point))
}

/// Spectral data of `∇T∘∇T` on the spatial part of a completion frame.
#[derive(Debug, Clone)]
pub struct SquaredNablaT {
    /// Eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest `|A − Aᵀ|` before symmetrisation.
    pub asymmetry: f64,
}

/// `∇T` (Riemannian) in the given g-orthonormal frame: `B[j][i]` is the
/// component of `∇_{E_i} T` along `E_j`.
fn riemannian_nabla_t(sp: &StationaryPoint, frame: &OrthonormalFrame) -> Mat {
    let e = &frame.vectors;
    let n = e.len();
    let images: Vec<Vec<f64>> = e.iter().map(|v| sp.nabla_g_t(v)).collect();
    Mat::from_fn(n, n, |j, i| sp.g(&images[i], &e[j]))
}

/// Eigenvalues of `∇T∘∇T` (all `n` of them, including the `T` direction).
pub fn squared_nabla_t_at(sp: &StationaryPoint, tol: &Tolerances) -> Result<SquaredNablaT> {
    check_unit(sp, tol)?;
    let frame = complete(sp)?;
    let b = riemannian_nabla_t(sp, &frame);
    let a = b.matmul(&b);
    Ok(SquaredNablaT {
        eigenvalues: jacobi_eigen(&a).values,
        asymmetry: a.asymmetry(),
    })
}

pub const CLUSTER_RELATIVE_GAP: f64 = 1e-7;

/// Adapted frame at an already-evaluated point.
pub fn adapted_frame_at(sp: &StationaryPoint, tol: &Tolerances) -> Result<OrthonormalFrame> {
    check_unit(sp, tol)?;
    let base = complete(sp)?;
    let n = sp.dim();
    let m = n - 1;
    let b_full = riemannian_nabla_t(sp, &base);
    let a_full = b_full.matmul(&b_full);
    let scale = a_full.max_abs().max(1.0);
    let asym = a_full.asymmetry();
    if asym > tol.of(1e-9) * scale {
        return Err(Error::NotSelfAdjoint(asym));
    }
    // Spatial blocks; the T row and column vanish for a unit Killing field.
    let bs = Mat::from_fn(m, m, |i, j| b_full[(i + 1, j + 1)]);
    let a = Mat::from_fn(m, m, |i, j| a_full[(i + 1, j + 1)]).symmetrized();
    let eig = jacobi_eigen(&a);
    if let Some(&top) = eig.values.last() {
        if top > tol.of(1e-6) {
            return Err(Error::PositiveEigenvalue(top));
        }
    }
    let kernel_tol = 1e-12 * scale;

    let to_coords = |c: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|k| (0..m).map(|j| c[j] * base.vectors[j + 1][k]).sum())
            .collect()
    };

    let mut kernel: Vec<Vec<f64>> = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate() {
        if lambda >= -kernel_tol {
            kernel.push(eig.vector(idx));
            continue;
        }
        match clusters.last_mut() {
            Some(cluster)
                if {
                    let prev = eig.values[*cluster.last().unwrap_or(&idx)];
                    (lambda - prev).abs() <= CLUSTER_RELATIVE_GAP * lambda.abs().max(prev.abs())
                } =>
            {
                cluster.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }
    if clusters.is_empty() {
        // T is parallel here: every spatial direction is fixed.
        let mut frame = base;
        frame.fixed = (1..n).collect();
        return Ok(frame);
    }

    let mut spatial: Vec<Vec<f64>> = kernel.clone();
    let mut pair_specs: Vec<(usize, usize, f64)> = Vec::new();
    for cluster in &clusters {
        if cluster.len() % 2 != 0 {
            return Err(Error::OddEigenspace {
                eigenvalue: eig.values[cluster[0]],
                dimension: cluster.len(),
            });
        }
        let basis: Vec<Vec<f64>> = cluster.iter().map(|&i| eig.vector(i)).collect();
        let mut chosen: Vec<Vec<f64>> = Vec::new();
        while chosen.len() < basis.len() {
            let project = |u: &[f64], chosen: &[Vec<f64>]| -> Vec<f64> {
                let mut r = u.to_vec();
                for c in chosen {
                    let k = dot(&r, c);
                    r.iter_mut().zip(c).for_each(|(x, y)| *x -= k * y);
                }
                r
            };
            let (v, len) = basis
                .iter()
                .map(|u| {
                    let r = project(u, &chosen);
                    let len = dot(&r, &r).sqrt();
                    (r, len)
                })
                .fold(
                    (Vec::new(), -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            let v: Vec<f64> = v.iter().map(|x| x / len).collect();
            let lambda = dot(&v, &a.matvec(&v));
            let root = (-lambda).sqrt();
            let w_raw: Vec<f64> = bs.matvec(&v).iter().map(|x| x / root).collect();
            let mut with_v = chosen.clone();
            with_v.push(v.clone());
            let w = project(&w_raw, &with_v);
            let wlen = dot(&w, &w).sqrt();
            let w: Vec<f64> = w.iter().map(|x| x / wlen).collect();
            chosen.push(v);
            chosen.push(w);
            pair_specs.push((
                spatial.len() + chosen.len() - 2,
                spatial.len() + chosen.len() - 1,
                -root,
            ));
        }
        spatial.extend(chosen);
    }

    let mut vectors = vec![base.vectors[0].clone()];
    vectors.extend(spatial.iter().map(|c| to_coords(c)));
    Ok(OrthonormalFrame {
        point: sp.point.clone(),
        vectors,
        pairs: pair_specs
            .into_iter()
            .map(|(a, b, f)| FramePair {
                first: a + 1,
                second: b + 1,
                f,
            })
            .collect(),
        fixed: (1..=kernel.len()).collect(),
    })
}

/// Frame diagonalising the pairing structure of `∇T∘∇T` for a unit
/// Killing field. Fixed directions come first, then pairs by decreasing `|f|`.
pub fn adapted_frame(s: &StationaryStructure, point: &[f64]) -> Result<OrthonormalFrame> {
    let sp = s.at(point)?;
    adapted_frame_at(&sp, &Tolerances::default()).map_err(|e| e.at(point))
}

/// Largest deviation of `∇^L T` from the frame's declared pairing pattern,
/// covering the pairs, the fixed directions and `∇^L_T T`.
pub fn pairing_residual(sp: &StationaryPoint, frame: &OrthonormalFrame) -> f64 {
    sp.nabla_t_matrix(frame)
        .max_abs_diff(&frame.pairing_pattern())
}
