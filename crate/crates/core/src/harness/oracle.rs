//! Reference values computed by routes independent of the jet machinery.

use crate::expr::Memo;
use crate::linalg::Mat;
use crate::metric::{Christoffel, FrameTag, MetricSpec, RiemannTensor};

pub const FD_STEP: f64 = 1e-4;

/// Step for differencing Christoffel symbols in [`fd_riemann_oracle`].
pub const FD_RIEMANN_STEP: f64 = 1e-3;

/// Richardson levels used by [`fd_riemann_oracle`].
pub const FD_RIEMANN_LEVELS: usize = 4;

fn metric_values(spec: &MetricSpec, point: &[f64]) -> Mat {
    let n = spec.dim();
    let mut memo = Memo::default();
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = spec
                .component(i, j)
                .eval_shared(point, spec.coords(), &mut memo)
                .expect("oracle evaluated outside the metric's domain");
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

fn central_difference(spec: &MetricSpec, point: &[f64], k: usize, h: f64) -> Mat {
    let n = spec.dim();
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    plus[k] += h;
    minus[k] -= h;
    let gp = metric_values(spec, &plus);
    let gm = metric_values(spec, &minus);
    Mat::from_fn(n, n, |i, j| (gp[(i, j)] - gm[(i, j)]) / (2.0 * h))
}

/// Christoffel symbols `Γ[k][i][j]` from central differences of the metric
/// components at steps `h` and `h/2`, Richardson-extrapolated to fourth
/// order so the oracle stays accurate where the metric varies quickly.
pub fn fd_christoffel_oracle(spec: &MetricSpec, point: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let n = spec.dim();
    let dg = (0..n)
        .map(|k| {
            let coarse = central_difference(spec, point, k, FD_STEP);
            let fine = central_difference(spec, point, k, FD_STEP / 2.0);
            Mat::from_fn(n, n, |i, j| (4.0 * fine[(i, j)] - coarse[(i, j)]) / 3.0)
        })
        .collect();
    christoffel_from(spec, point, dg)
}

/// Plain second-order central differences at step `h`.
pub fn fd_christoffel_oracle_with_step(
    spec: &MetricSpec,
    point: &[f64],
    h: f64,
) -> Vec<Vec<Vec<f64>>> {
    let dg = (0..spec.dim())
        .map(|k| central_difference(spec, point, k, h))
        .collect();
    christoffel_from(spec, point, dg)
}

fn christoffel_from(spec: &MetricSpec, point: &[f64], dg: Vec<Mat>) -> Vec<Vec<Vec<f64>>> {
    let n = spec.dim();
    let g_inv = metric_values(spec, point)
        .inverse()
        .expect("oracle metric is singular");
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            0.5 * (0..n)
                                .map(|l| {
                                    g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])
                                })
                                .sum::<f64>()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Christoffel symbols from first-order duals of the metric components.
fn christoffel_at(spec: &MetricSpec, point: &[f64]) -> Christoffel {
    let n = spec.dim();
    let mut memo = Memo::default();
    let mut duals = vec![None; n * n];
    for i in 0..n {
        for j in i..n {
            let d = spec
                .component(i, j)
                .eval_dual_shared(point, spec.coords(), &mut memo)
                .expect("oracle evaluated outside the metric's domain");
            duals[i * n + j] = Some(d.clone());
            duals[j * n + i] = Some(d);
        }
    }
    let dual = |i: usize, j: usize| duals[i * n + j].as_ref().expect("filled above");
    let g = Mat::from_fn(n, n, |i, j| dual(i, j).value());
    let g_inv = g.inverse().expect("oracle metric is singular");
    // dg(k, i, j) = ∂_k g_ij
    let dg = |k: usize, i: usize, j: usize| dual(i, j).gradient()[k];
    Christoffel::from_fn(n, |k, i, j| {
        0.5 * (0..n)
            .map(|l| g_inv[(k, l)] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j)))
            .sum::<f64>()
    })
}

/// Central difference of Christoffel symbols along `k` at step `h`.
fn christoffel_difference(spec: &MetricSpec, point: &[f64], k: usize, h: f64) -> Vec<f64> {
    let n = spec.dim();
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    plus[k] += h;
    minus[k] -= h;
    let (gp, gm) = (christoffel_at(spec, &plus), christoffel_at(spec, &minus));
    let mut out = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[(l * n + i) * n + j] = (gp.get(l, i, j) - gm.get(l, i, j)) / (2.0 * h);
            }
        }
    }
    out
}

/// `∂_k Γ` from central differences at `h, h/2, .., h/2^(levels−1)`
/// combined by repeated Richardson extrapolation (order `2·levels`).
fn christoffel_derivative(
    spec: &MetricSpec,
    point: &[f64],
    k: usize,
    h: f64,
    levels: usize,
) -> Vec<f64> {
    let mut table: Vec<Vec<f64>> = (0..levels)
        .map(|i| christoffel_difference(spec, point, k, h / f64::from(1u32 << i)))
        .collect();
    for order in 1..levels {
        let factor = 4f64.powi(order as i32);
        table = table
            .windows(2)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .map(|(c, f)| (factor * f - c) / (factor - 1.0))
                    .collect()
            })
            .collect();
    }
    table.remove(0)
}

/// Lowered Riemann tensor in coordinates, `Rm(∂_i,∂_j,∂_k,∂_h)`, built from
/// differenced Christoffel symbols instead of second metric derivatives.
pub fn fd_riemann_oracle(spec: &MetricSpec, point: &[f64]) -> RiemannTensor {
    fd_riemann_oracle_with(spec, point, FD_RIEMANN_STEP, FD_RIEMANN_LEVELS)
}

/// [`fd_riemann_oracle`] with an explicit base step and extrapolation depth.
pub fn fd_riemann_oracle_with(
    spec: &MetricSpec,
    point: &[f64],
    h: f64,
    levels: usize,
) -> RiemannTensor {
    let n = spec.dim();
    let g = metric_values(spec, point);
    let gamma = christoffel_at(spec, point);
    let dgamma: Vec<Vec<f64>> = (0..n)
        .map(|k| christoffel_derivative(spec, point, k, h, levels.max(1)))
        .collect();
    let d = |m: usize, l: usize, i: usize, j: usize| dgamma[m][(l * n + i) * n + j];
    // R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
    let up = |l: usize, i: usize, j: usize, k: usize| {
        d(i, l, j, k) - d(j, l, i, k)
            + (0..n)
                .map(|m| {
                    gamma.get(l, i, m) * gamma.get(m, j, k)
                        - gamma.get(l, j, m) * gamma.get(m, i, k)
                })
                .sum::<f64>()
    };
    RiemannTensor::from_fn(point, FrameTag::Coordinate, n, |i, j, k, h| {
        (0..n).map(|l| g[(l, h)] * up(l, i, j, k)).sum()
    })
}

/// Constant-curvature tensor `κ (η_ad η_bc − η_ac η_bd)` for frame Gram
/// matrix `eta`, in the convention where `Rm(X,Y,Y,X)` is the sectional
/// curvature.
pub fn constant_curvature_oracle(n: usize, kappa: f64, eta: &Mat) -> RiemannTensor {
    RiemannTensor::from_fn(&[], FrameTag::Orthonormal, n, |a, b, c, d| {
        kappa * (eta[(a, d)] * eta[(b, c)] - eta[(a, c)] * eta[(b, d)])
    })
}
