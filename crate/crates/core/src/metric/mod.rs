//! Metric evaluation, Christoffel symbols and the Riemann 4-tensor.
//!
//! Curvature sign convention: `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z`
//! and `Rm(X,Y,Z,W) = g(R(X,Y)Z, W)`. With this convention the unit round
//! sphere has `Rm(X,Y,Y,X) = 1` for orthonormal `X, Y`.

mod spec;

pub use spec::{
    load_spec, Chart, KillingSpec, MetricSpec, Signature, DEFAULT_CHART_MARGIN, MAX_DIMENSION,
};

use crate::error::{Error, Result};
use crate::expr::{Jet, Memo};
use crate::linalg::{jacobi_eigen, Mat};

/// Metric, inverse and first two derivatives at one point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub point: Vec<f64>,
    pub g: Mat,
    pub g_inv: Mat,
    n: usize,
    /// `∂_k g_ij` at `[k][i][j]`.
    dg: Vec<f64>,
    /// `∂_k ∂_l g_ij` at `[k][l][i][j]`.
    d2g: Vec<f64>,
}

impl MetricAtPoint {
    /// Assemble from component jets `jets[i][j]` (assumed symmetric).
    pub fn from_jets(point: &[f64], jets: &[Vec<Jet>]) -> Result<Self> {
        let n = point.len();
        let g = Mat::from_fn(n, n, |i, j| jets[i][j].value());
        let mut dg = vec![0.0; n * n * n];
        let mut d2g = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                let jet = &jets[i][j];
                for k in 0..n {
                    dg[(k * n + i) * n + j] = jet.gradient()[k];
                    for l in 0..n {
                        d2g[((k * n + l) * n + i) * n + j] = jet.hessian(k, l);
                    }
                }
            }
        }
        let det = g.det();
        if det.abs() < 1e-12 {
            return Err(Error::NearSingular { det });
        }
        let g_inv = g.inverse().ok_or(Error::NearSingular { det })?;
        Ok(MetricAtPoint {
            point: point.to_vec(),
            g,
            g_inv,
            n,
            dg,
            d2g,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dg[(k * self.n + i) * self.n + j]
    }

    pub fn d2g(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.d2g[((k * self.n + l) * self.n + i) * self.n + j]
    }

    pub fn check_signature(&self, signature: Signature) -> Result<()> {
        let eig = jacobi_eigen(&self.g).values;
        let negatives = eig.iter().filter(|v| **v < 0.0).count();
        let zeros = eig.iter().filter(|v| **v == 0.0).count();
        let expected = match signature {
            Signature::Riemannian => 0,
            Signature::Lorentzian => 1,
        };
        if negatives != expected || zeros > 0 {
            return Err(Error::SignatureMismatch {
                expected: signature.name().into(),
                eigenvalues: eig,
            });
        }
        Ok(())
    }

    /// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
    pub fn christoffel(&self) -> Christoffel {
        let n = self.n;
        let first = self.first_kind();
        let mut data = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    data[(k * n + i) * n + j] = (0..n)
                        .map(|l| self.g_inv[(k, l)] * first[(l * n + i) * n + j])
                        .sum();
                }
            }
        }
        Christoffel { n, data }
    }

    /// Christoffel symbols of the first kind, `Γ_lij` at `[l][i][j]`.
    fn first_kind(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[(l * n + i) * n + j] =
                        0.5 * (self.dg(i, j, l) + self.dg(j, i, l) - self.dg(l, i, j));
                }
            }
        }
        out
    }

    /// `∂_m Γ^k_ij` at `[m][k][i][j]`.
    fn christoffel_derivative(&self) -> Vec<f64> {
        let n = self.n;
        let first = self.first_kind();
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let mut dinv = vec![0.0; n * n * n];
        for m in 0..n {
            let dm = Mat::from_fn(n, n, |a, b| self.dg(m, a, b));
            let prod = self.g_inv.matmul(&dm).matmul(&self.g_inv);
            for k in 0..n {
                for l in 0..n {
                    dinv[(m * n + k) * n + l] = -prod[(k, l)];
                }
            }
        }
        let mut out = vec![0.0; n * n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let dfirst: Vec<f64> = (0..n)
                        .map(|l| {
                            0.5 * (self.d2g(m, i, j, l) + self.d2g(m, j, i, l)
                                - self.d2g(m, l, i, j))
                        })
                        .collect();
                    for k in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += dinv[(m * n + k) * n + l] * first[(l * n + i) * n + j]
                                + self.g_inv[(k, l)] * dfirst[l];
                        }
                        out[((m * n + k) * n + i) * n + j] = s;
                    }
                }
            }
        }
        out
    }

    /// Lowered Riemann tensor in coordinates.
    pub fn riemann(&self) -> RiemannTensor {
        let n = self.n;
        let gamma = self.christoffel();
        let dgamma = self.christoffel_derivative();
        let dg = |m: usize, k: usize, i: usize, j: usize| dgamma[((m * n + k) * n + i) * n + j];
        // R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
        let mut up = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut s = dg(i, l, j, k) - dg(j, l, i, k);
                        for m in 0..n {
                            s += gamma.get(l, i, m) * gamma.get(m, j, k)
                                - gamma.get(l, j, m) * gamma.get(m, i, k);
                        }
                        up[((l * n + i) * n + j) * n + k] = s;
                    }
                }
            }
        }
        let mut data = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for h in 0..n {
                        data[((i * n + j) * n + k) * n + h] = (0..n)
                            .map(|l| self.g[(l, h)] * up[((l * n + i) * n + j) * n + k])
                            .sum();
                    }
                }
            }
        }
        RiemannTensor {
            point: self.point.clone(),
            frame: FrameTag::Coordinate,
            n,
            data,
        }
    }
}

impl MetricSpec {
    /// Jets of every component at `point`, as a full symmetric array.
    pub fn component_jets(&self, point: &[f64]) -> Result<Vec<Vec<Jet>>> {
        let n = self.dim();
        let mut memo = Memo::default();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(self.component(i, j).eval_jet_shared(
                    point,
                    self.coords(),
                    &mut memo,
                )?);
            }
        }
        let idx = |i: usize, j: usize| {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            i * n - i * (i + 1) / 2 + j
        };
        Ok((0..n)
            .map(|i| (0..n).map(|j| upper[idx(i, j)].clone()).collect())
            .collect())
    }
}

/// Evaluate the metric at an interior point, checking the signature.
pub fn metric_at(spec: &MetricSpec, point: &[f64]) -> Result<MetricAtPoint> {
    spec.chart.check_interior(point)?;
    let jets = spec.component_jets(point)?;
    let m = MetricAtPoint::from_jets(point, &jets)?;
    m.check_signature(spec.signature)?;
    Ok(m)
}

/// Christoffel symbols `Γ^k_ij`, stored at `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    data[(k * n + i) * n + j] = f(k, i, j);
                }
            }
        }
        Christoffel { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// `Γ(u, v)^k = Γ^k_ij u^i v^j`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                u.iter()
                    .enumerate()
                    .map(|(i, ui)| {
                        v.iter()
                            .enumerate()
                            .map(|(j, vj)| self.get(k, i, j) * ui * vj)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .collect()
    }

    /// `∇_v Y` for a vector field with value `y` and Jacobian
    /// `dy[k][m] = ∂_m Y^k`.
    pub fn covariant_derivative(&self, v: &[f64], y: &[f64], dy: &Mat) -> Vec<f64> {
        let mut out = dy.matvec(v);
        for (o, c) in out.iter_mut().zip(self.contract(v, y)) {
            *o += c;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|Γ^k_ij − Γ^k_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    m = m.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        m
    }
}

pub fn christoffel(m: &MetricAtPoint) -> Christoffel {
    m.christoffel()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameTag {
    Coordinate,
    Orthonormal,
}

/// Components `Rm(X_a, X_b, X_c, X_d)` of the lowered curvature tensor.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    pub point: Vec<f64>,
    pub frame: FrameTag,
    n: usize,
    data: Vec<f64>,
}

/// Largest violations of the algebraic curvature symmetries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl RiemannTensor {
    pub fn from_fn(
        point: &[f64],
        frame: FrameTag,
        n: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        data[((a * n + b) * n + c) * n + d] = f(a, b, c, d);
                    }
                }
            }
        }
        RiemannTensor {
            point: point.to_vec(),
            frame,
            n,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &RiemannTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let n = self.n;
        let mut r = SymmetryResiduals {
            antisymmetry: 0.0,
            pair_symmetry: 0.0,
            bianchi: 0.0,
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = self.get(a, b, c, d);
                        r.antisymmetry = r
                            .antisymmetry
                            .max((v + self.get(b, a, c, d)).abs())
                            .max((v + self.get(a, b, d, c)).abs());
                        r.pair_symmetry = r.pair_symmetry.max((v - self.get(c, d, a, b)).abs());
                        r.bianchi = r
                            .bianchi
                            .max((v + self.get(a, c, d, b) + self.get(a, d, b, c)).abs());
                    }
                }
            }
        }
        r
    }

    /// Contract every slot with the given frame vectors (coordinate
    /// components). The result is tagged orthonormal.
    pub fn frame_components(&self, frame: &[Vec<f64>]) -> Result<RiemannTensor> {
        let n = self.n;
        if frame.len() != n || frame.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "frame must have {n} vectors of length {n}"
            )));
        }
        let basis = Mat::from_fn(n, n, |i, a| frame[a][i]);
        let scale: f64 = frame
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if basis.det().abs() <= 1e-12 * scale {
            return Err(Error::RankDeficientFrame);
        }
        // Contract one slot at a time: O(n^5).
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let mut next = vec![0.0; n * n * n * n];
            let stride = n.pow(3 - slot as u32);
            for (flat, out) in next.iter_mut().enumerate() {
                let a = (flat / stride) % n;
                let base = flat - a * stride;
                let mut s = 0.0;
                for i in 0..n {
                    s += frame[a][i] * cur[base + i * stride];
                }
                *out = s;
            }
            cur = next;
        }
        Ok(RiemannTensor {
            point: self.point.clone(),
            frame: FrameTag::Orthonormal,
            n,
            data: cur,
        })
    }
}

/// Riemann tensor in coordinates at `point`.
pub fn riemann_coordinate(spec: &MetricSpec, point: &[f64]) -> Result<RiemannTensor> {
    Ok(metric_at(spec, point)?.riemann())
}

pub fn frame_components(tensor: &RiemannTensor, frame: &[Vec<f64>]) -> Result<RiemannTensor> {
    tensor.frame_components(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use std::f64::consts::PI;

    fn round_s3() -> MetricSpec {
        let coords: Vec<String> = ["t", "a", "b"].iter().map(|s| s.to_string()).collect();
        let chart = Chart {
            coords: coords.clone(),
            intervals: vec![(0.0, PI / 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
            margin: DEFAULT_CHART_MARGIN,
        };
        let text = |i: usize, j: usize| match (i, j) {
            (0, 0) => "1",
            (1, 1) => "sin(t)^2",
            (2, 2) => "cos(t)^2",
            _ => "0",
        };
        MetricSpec::new(chart, Signature::Riemannian, |i, j| {
            parse_expression(text(i, j), &coords).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn round_s3_christoffel_by_hand() {
        let spec = round_s3();
        let t = 0.7;
        let m = metric_at(&spec, &[t, 1.0, 2.0]).unwrap();
        let gamma = m.christoffel();
        assert!((gamma.get(0, 1, 1) + t.sin() * t.cos()).abs() < 1e-14);
        assert!((gamma.get(0, 2, 2) - t.sin() * t.cos()).abs() < 1e-14);
        assert!((gamma.get(1, 0, 1) - t.cos() / t.sin()).abs() < 1e-14);
        assert!(gamma.asymmetry() == 0.0);
        assert!(m.g.matmul(&m.g_inv).max_abs_diff(&Mat::identity(3)) < 1e-10);
    }

    #[test]
    fn round_s3_is_unit_curvature() {
        let spec = round_s3();
        let t: f64 = 0.4;
        let r = riemann_coordinate(&spec, &[t, 0.3, 0.3]).unwrap();
        let frame = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0 / t.sin(), 0.0],
            vec![0.0, 0.0, 1.0 / t.cos()],
        ];
        let on = r.frame_components(&frame).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    assert!((on.get(a, b, b, a) - 1.0).abs() < 1e-12);
                    assert!((on.get(a, b, a, b) + 1.0).abs() < 1e-12);
                }
            }
        }
        let res = on.symmetry_residuals();
        assert!(res.bianchi < 1e-12 && res.antisymmetry < 1e-12 && res.pair_symmetry < 1e-12);
    }

    #[test]
    fn frame_scaling_is_multilinear() {
        let spec = round_s3();
        let r = riemann_coordinate(&spec, &[0.9, 0.3, 0.3]).unwrap();
        let id: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let same = r.frame_components(&id).unwrap();
        assert!(same.max_abs_diff(&r) == 0.0);
        let mut scaled = id.clone();
        scaled[1][1] = 2.0;
        let s = r.frame_components(&scaled).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let k = [a, b, c, d].iter().filter(|&&x| x == 1).count() as i32;
                        let expected = r.get(a, b, c, d) * 2f64.powi(k);
                        assert!((s.get(a, b, c, d) - expected).abs() < 1e-13);
                    }
                }
            }
        }
        let mut dependent = id;
        dependent[2] = dependent[1].clone();
        assert!(matches!(
            r.frame_components(&dependent),
            Err(Error::RankDeficientFrame)
        ));
    }

    #[test]
    fn signature_mismatch_and_boundary() {
        let spec = round_s3();
        assert!(matches!(
            metric_at(&spec, &[0.0, 1.0, 1.0]),
            Err(Error::ChartBoundary { .. })
        ));
        let mut lorentz = spec.clone();
        lorentz.signature = Signature::Lorentzian;
        assert!(matches!(
            metric_at(&lorentz, &[0.5, 1.0, 1.0]),
            Err(Error::SignatureMismatch { .. })
        ));
    }
}
