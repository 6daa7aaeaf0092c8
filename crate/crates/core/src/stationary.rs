//! A Lorentzian metric together with a timelike Killing field `T`.
//!
//! The Riemannian counterpart is `g = g_L − 2 T♭⊗T♭ / g_L(T,T)` with
//! `T♭ = g_L(T, ·)`. It is built symbolically, so its Christoffel symbols
//! and curvature come from its own jets rather than from the relations
//! being verified.

use std::cell::OnceCell;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use crate::frames::OrthonormalFrame;
use crate::linalg::{bilinear, Mat};
use crate::metric::{
    metric_at, Christoffel, FrameTag, KillingSpec, MetricAtPoint, MetricSpec, RiemannTensor,
    Signature,
};

#[derive(Debug, Clone)]
pub struct StationaryStructure {
    lorentzian: MetricSpec,
    killing: Vec<Expr>,
    unit: bool,
    riemannian: MetricSpec,
}

/// `G − 2 T♭⊗T♭ / G(T,T)`, composed symbolically.
fn flip_components(spec: &MetricSpec, killing: &[Expr]) -> Result<MetricSpec> {
    let n = spec.dim();
    let flat: Vec<Expr> = (0..n)
        .map(|i| {
            (0..n).fold(Expr::zero(), |acc, k| {
                acc.add(&spec.component(i, k).mul(&killing[k]))
            })
        })
        .collect();
    let norm = (0..n).fold(Expr::zero(), |acc, i| acc.add(&flat[i].mul(&killing[i])));
    if norm.is_zero() {
        return Err(Error::Composition(
            "Killing field is identically zero".into(),
        ));
    }
    let two_over_norm = Expr::num(2.0).div(&norm);
    MetricSpec::new(spec.chart.clone(), spec.signature.flipped(), |i, j| {
        spec.component(i, j)
            .sub(&two_over_norm.mul(&flat[i].mul(&flat[j])))
    })
}

impl StationaryStructure {
    pub fn new(lorentzian: MetricSpec, killing: Vec<Expr>, unit: bool) -> Result<Self> {
        if lorentzian.signature != Signature::Lorentzian {
            return Err(Error::SignatureMismatch {
                expected: Signature::Lorentzian.name().into(),
                eigenvalues: Vec::new(),
            });
        }
        if killing.len() != lorentzian.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Killing field has {} components, metric has dimension {}",
                killing.len(),
                lorentzian.dim()
            )));
        }
        let mut lorentzian = lorentzian;
        lorentzian.killing = None;
        let riemannian = flip_components(&lorentzian, &killing)?;
        Ok(StationaryStructure {
            lorentzian,
            killing,
            unit,
            riemannian,
        })
    }

    /// Build from a loaded spec with a `[killing]` section.
    pub fn from_spec(spec: MetricSpec) -> Result<Self> {
        let Some(k) = spec.killing.clone() else {
            return Err(Error::Format("spec has no [killing] section".into()));
        };
        StationaryStructure::new(spec, k.components, k.unit)
    }

    /// Build the Lorentzian partner of a Riemannian metric with Killing
    /// field `T`, applying the same flip formula.
    pub fn from_riemannian(riemannian: MetricSpec, killing: Vec<Expr>, unit: bool) -> Result<Self> {
        if riemannian.signature != Signature::Riemannian {
            return Err(Error::SignatureMismatch {
                expected: Signature::Riemannian.name().into(),
                eigenvalues: Vec::new(),
            });
        }
        let lorentzian = flip_components(&riemannian, &killing)?;
        StationaryStructure::new(lorentzian, killing, unit)
    }

    pub fn dim(&self) -> usize {
        self.lorentzian.dim()
    }

    pub fn lorentzian(&self) -> &MetricSpec {
        &self.lorentzian
    }

    /// The symbolic Riemannian counterpart `g`.
    pub fn riemannian(&self) -> &MetricSpec {
        &self.riemannian
    }

    pub fn killing(&self) -> &[Expr] {
        &self.killing
    }

    pub fn unit_flag(&self) -> bool {
        self.unit
    }

    pub fn coords(&self) -> &[String] {
        self.lorentzian.coords()
    }

    /// The Lorentzian spec with its `[killing]` section, ready to serialise.
    pub fn to_spec(&self) -> MetricSpec {
        let mut spec = self.lorentzian.clone();
        spec.killing = Some(KillingSpec {
            components: self.killing.clone(),
            unit: self.unit,
        });
        spec
    }

    /// Evaluate everything needed for pointwise checks at `point`.
    pub fn at(&self, point: &[f64]) -> Result<StationaryPoint> {
        self.eval_point(point).map_err(|e| e.at(point))
    }

    fn eval_point(&self, point: &[f64]) -> Result<StationaryPoint> {
        let n = self.dim();
        let lorentzian = metric_at(&self.lorentzian, point)?;
        let killing_jets = self
            .killing
            .iter()
            .map(|e| e.eval_jet(point, self.coords()))
            .collect::<Result<Vec<Jet>, _>>()?;
        let killing: Vec<f64> = killing_jets.iter().map(Jet::value).collect();
        let killing_jacobian = Mat::from_fn(n, n, |k, m| killing_jets[k].gradient()[m]);
        let norm = bilinear(&lorentzian.g, &killing, &killing);
        if norm.is_nan() || norm >= 0.0 {
            return Err(Error::NotTimelike { norm });
        }
        let riemannian = metric_at(&self.riemannian, point)?;
        // ∂_m g_L(T,T) = ∂_m g_ij T^i T^j + 2 g_ij ∂_m T^i T^j
        let norm_gradient = (0..n)
            .map(|m| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += lorentzian.dg(m, i, j) * killing[i] * killing[j]
                            + 2.0 * lorentzian.g[(i, j)] * killing_jacobian[(i, m)] * killing[j];
                    }
                }
                s
            })
            .collect();
        Ok(StationaryPoint {
            point: point.to_vec(),
            gamma_l: lorentzian.christoffel(),
            gamma_g: riemannian.christoffel(),
            lorentzian,
            riemannian,
            killing,
            killing_jacobian,
            norm,
            norm_gradient,
            riemann_l: OnceCell::new(),
            riemann_g: OnceCell::new(),
        })
    }
}

/// Pointwise data of a stationary structure.
#[derive(Debug)]
pub struct StationaryPoint {
    pub point: Vec<f64>,
    pub lorentzian: MetricAtPoint,
    pub riemannian: MetricAtPoint,
    pub gamma_l: Christoffel,
    pub gamma_g: Christoffel,
    /// `T` in coordinates.
    pub killing: Vec<f64>,
    /// `∂_m T^k` at `(k, m)`.
    pub killing_jacobian: Mat,
    /// `g_L(T,T)`.
    pub norm: f64,
    /// Coordinate gradient of `g_L(T,T)`.
    pub norm_gradient: Vec<f64>,
    riemann_l: OnceCell<RiemannTensor>,
    riemann_g: OnceCell<RiemannTensor>,
}

/// Residuals of the four connection relations, as g-norms of vector
/// residuals maximised over frame indices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConnectionResiduals {
    /// `∇_T T = −∇^L_T T`
    pub t_t: f64,
    /// `∇_X T = −∇^L_X T + X(ln g(T,T)) T`
    pub x_t: f64,
    /// `∇_X Y = ∇^L_X Y`
    pub x_x: f64,
    /// `∇_T X = ∇^L_T X − 2∇^L_X T + X(ln g(T,T)) T`
    pub t_x: f64,
}

impl ConnectionResiduals {
    pub fn max(&self) -> f64 {
        self.t_t.max(self.x_t).max(self.x_x).max(self.t_x)
    }
}

/// Residuals of the three curvature relation classes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvatureResiduals {
    /// `Rm(X_i,X_j,T,X_k) = −Rm_L(X_i,X_j,T,X_k)`
    pub mixed: f64,
    /// `Rm(T,X_i,T,X_j)` relation.
    pub time_time: f64,
    /// `Rm(X_i,X_j,X_k,X_l)` relation.
    pub spatial: f64,
}

impl CurvatureResiduals {
    pub fn max(&self) -> f64 {
        self.mixed.max(self.time_time).max(self.spatial)
    }
}

impl StationaryPoint {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn riemann_l(&self) -> &RiemannTensor {
        self.riemann_l.get_or_init(|| self.lorentzian.riemann())
    }

    pub fn riemann_g(&self) -> &RiemannTensor {
        self.riemann_g.get_or_init(|| self.riemannian.riemann())
    }

    /// `∇^L_v T` in coordinates.
    pub fn nabla_l_t(&self, v: &[f64]) -> Vec<f64> {
        self.gamma_l
            .covariant_derivative(v, &self.killing, &self.killing_jacobian)
    }

    /// `∇_v T` for the Riemannian counterpart.
    pub fn nabla_g_t(&self, v: &[f64]) -> Vec<f64> {
        self.gamma_g
            .covariant_derivative(v, &self.killing, &self.killing_jacobian)
    }

    /// `v(g_L(T,T))`.
    pub fn norm_derivative(&self, v: &[f64]) -> f64 {
        crate::linalg::dot(&self.norm_gradient, v)
    }

    pub fn gl(&self, a: &[f64], b: &[f64]) -> f64 {
        bilinear(&self.lorentzian.g, a, b)
    }

    pub fn g(&self, a: &[f64], b: &[f64]) -> f64 {
        bilinear(&self.riemannian.g, a, b)
    }

    fn g_norm(&self, v: &[f64]) -> f64 {
        self.g(v, v).max(0.0).sqrt()
    }

    /// `max_ij |(𝔏_T g_L)_ij|`.
    pub fn killing_defect(&self) -> f64 {
        let n = self.dim();
        let (g, t, dt) = (&self.lorentzian.g, &self.killing, &self.killing_jacobian);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += t[k] * self.lorentzian.dg(k, i, j)
                        + g[(k, j)] * dt[(k, i)]
                        + g[(i, k)] * dt[(k, j)];
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// The Killing field and the spatial frame vectors `X_1..X_{n-1}`.
    fn prop_frame(&self, frame: &OrthonormalFrame) -> Vec<Vec<f64>> {
        let mut vectors = vec![self.killing.clone()];
        vectors.extend(frame.vectors[1..].iter().cloned());
        vectors
    }

    /// `A[j][i]` = component of `∇^L_{E_i} T` along `E_j`.
    pub fn nabla_t_matrix(&self, frame: &OrthonormalFrame) -> Mat {
        let e = &frame.vectors;
        let n = e.len();
        let images: Vec<Vec<f64>> = e.iter().map(|v| self.nabla_l_t(v)).collect();
        Mat::from_fn(n, n, |j, i| {
            self.gl(&images[i], &e[j]) / self.gl(&e[j], &e[j])
        })
    }

    pub fn connection_residuals(&self, frame: &OrthonormalFrame) -> ConnectionResiduals {
        let t = &self.killing;
        let xs = &frame.vectors[1..];
        let n = self.dim();
        let diff = |u: &[f64], v: &[f64]| -> Vec<f64> {
            let a = self.gamma_g.contract(u, v);
            let b = self.gamma_l.contract(u, v);
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        let combine = |parts: &[(f64, &[f64])]| -> Vec<f64> {
            (0..n)
                .map(|k| parts.iter().map(|(c, v)| c * v[k]).sum())
                .collect()
        };

        let tt = combine(&[(1.0, &self.nabla_g_t(t)), (1.0, &self.nabla_l_t(t))]);
        let mut r = ConnectionResiduals {
            t_t: self.g_norm(&tt),
            x_t: 0.0,
            x_x: 0.0,
            t_x: 0.0,
        };
        for x in xs {
            // X(ln g(T,T)) = X(g_L(T,T)) / g_L(T,T)
            let log_der = self.norm_derivative(x) / self.norm;
            let nl = self.nabla_l_t(x);
            let xt = combine(&[(1.0, &self.nabla_g_t(x)), (1.0, &nl), (-log_der, t)]);
            r.x_t = r.x_t.max(self.g_norm(&xt));
            let tx = combine(&[(1.0, &diff(t, x)), (2.0, &nl), (-log_der, t)]);
            r.t_x = r.t_x.max(self.g_norm(&tx));
            for y in xs {
                r.x_x = r.x_x.max(self.g_norm(&diff(x, y)));
            }
        }
        r
    }

    pub fn curvature_residuals(&self, frame: &OrthonormalFrame) -> Result<CurvatureResiduals> {
        self.curvature_residuals_with(frame, self.riemann_g(), self.riemann_l())
    }

    /// The same relations with coordinate curvature tensors supplied by the
    /// caller, so an independently computed pair can be checked.
    pub fn curvature_residuals_with(
        &self,
        frame: &OrthonormalFrame,
        riemann_g: &RiemannTensor,
        riemann_l: &RiemannTensor,
    ) -> Result<CurvatureResiduals> {
        let vectors = self.prop_frame(frame);
        let rm = riemann_g.frame_components(&vectors)?;
        let rml = riemann_l.frame_components(&vectors)?;
        let n = self.dim();
        let nabla: Vec<Vec<f64>> = vectors.iter().map(|v| self.nabla_l_t(v)).collect();
        // a[p][q] = g_L(∇^L_{X_p} T, X_q)
        let a = Mat::from_fn(n, n, |p, q| self.gl(&nabla[p], &vectors[q]));
        let b: Vec<f64> = vectors.iter().map(|v| self.norm_derivative(v)).collect();
        let norm = self.norm;

        let mut r = CurvatureResiduals {
            mixed: 0.0,
            time_time: 0.0,
            spatial: 0.0,
        };
        for i in 1..n {
            for j in 1..n {
                for k in 1..n {
                    r.mixed = r
                        .mixed
                        .max((rm.get(i, j, 0, k) + rml.get(i, j, 0, k)).abs());
                }
                let rhs = -rml.get(0, i, 0, j) - 2.0 * self.gl(&nabla[i], &nabla[j])
                    + b[i] * b[j] / (2.0 * norm);
                r.time_time = r.time_time.max((rm.get(0, i, 0, j) - rhs).abs());
                for k in 1..n {
                    for l in 1..n {
                        let correction = a[(i, l)] * a[(j, k)]
                            - a[(i, k)] * a[(j, l)]
                            - 2.0 * a[(i, j)] * a[(k, l)];
                        let rhs = rml.get(i, j, k, l) + 2.0 / norm * correction;
                        r.spatial = r.spatial.max((rm.get(i, j, k, l) - rhs).abs());
                    }
                }
            }
        }
        Ok(r)
    }

    /// Components of both curvature tensors against `[T, X_1, ..]`.
    pub fn prop_frame_tensors(
        &self,
        frame: &OrthonormalFrame,
    ) -> Result<(RiemannTensor, RiemannTensor)> {
        let vectors = self.prop_frame(frame);
        let rm = self.riemann_g().frame_components(&vectors)?;
        let rml = self.riemann_l().frame_components(&vectors)?;
        debug_assert_eq!(rm.frame, FrameTag::Orthonormal);
        Ok((rm, rml))
    }
}

/// Flip a metric matrix along `t`: `G − 2 t♭⊗t♭ / G(t,t)`.
pub fn flip_matrix(g: &Mat, t: &[f64]) -> Mat {
    let flat = g.matvec(t);
    let norm = crate::linalg::dot(&flat, t);
    Mat::from_fn(g.rows(), g.cols(), |i, j| {
        g[(i, j)] - 2.0 * flat[i] * flat[j] / norm
    })
}

pub fn killing_defect(s: &StationaryStructure, point: &[f64]) -> Result<f64> {
    Ok(s.at(point)?.killing_defect())
}

/// Numeric Riemannian counterpart at a point, from `g_L` and `T` values.
pub fn riemannian_counterpart(s: &StationaryStructure, point: &[f64]) -> Result<Mat> {
    s.lorentzian.chart.check_interior(point)?;
    let jets = s.lorentzian.component_jets(point)?;
    let n = s.dim();
    let gl = Mat::from_fn(n, n, |i, j| jets[i][j].value());
    let t = s
        .killing
        .iter()
        .map(|e| e.eval(point, s.coords()))
        .collect::<Result<Vec<f64>, _>>()?;
    let norm = bilinear(&gl, &t, &t);
    if norm.is_nan() || norm >= 0.0 {
        return Err(Error::NotTimelike { norm });
    }
    Ok(flip_matrix(&gl, &t))
}

/// `g̃_L = g_L / (−g_L(T,T))`, composed symbolically; `T` becomes unit.
pub fn conformal_normalize(s: &StationaryStructure) -> Result<StationaryStructure> {
    let n = s.dim();
    let spec = &s.lorentzian;
    let norm = (0..n).fold(Expr::zero(), |acc, i| {
        (0..n).fold(acc, |acc, j| {
            acc.add(&spec.component(i, j).mul(&s.killing[i]).mul(&s.killing[j]))
        })
    });
    if norm.is_zero() {
        return Err(Error::Composition("g_L(T,T) is identically zero".into()));
    }
    let factor = norm.neg();
    let normalized = MetricSpec::new(spec.chart.clone(), Signature::Lorentzian, |i, j| {
        spec.component(i, j).div(&factor)
    })?;
    StationaryStructure::new(normalized, s.killing.clone(), true)
}

pub fn nabla_t_matrix(s: &StationaryStructure, frame: &OrthonormalFrame) -> Result<Mat> {
    Ok(s.at(&frame.point)?.nabla_t_matrix(frame))
}

pub fn verify_connection_relations(
    s: &StationaryStructure,
    frame: &OrthonormalFrame,
) -> Result<ConnectionResiduals> {
    Ok(s.at(&frame.point)?.connection_residuals(frame))
}

pub fn verify_curvature_relations(
    s: &StationaryStructure,
    frame: &OrthonormalFrame,
) -> Result<CurvatureResiduals> {
    s.at(&frame.point)?.curvature_residuals(frame)
}
