//! Curvature operators on Λ².
//!
//! The operator `R̂` is defined by `⟨R̂(v∧w), x∧y⟩ = −Rm(v,w,x,y)` against
//! the Λ² inner product `⟨v∧w, x∧y⟩ = g(v,x)g(w,y) − g(v,y)g(w,x)`. Its
//! matrix in a basis `e_A` is `M = G⁻¹ Kᵀ` with `G` the Λ² Gram matrix and
//! `K[B][C] = −Rm(e_B, e_C)`. In a g-orthonormal frame `G = I`; for the
//! Lorentzian metric the `T∧X_i` rows pick up the sign `⟨T∧X_i, T∧X_i⟩_L = −1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{pairing_residual, OrthonormalFrame};
use crate::linalg::Mat;
use crate::metric::RiemannTensor;
use crate::stationary::{StationaryPoint, StationaryStructure};
use crate::tolerance::Tolerances;

/// Ordered basis of Λ² over frame indices, `0` standing for `T`.
///
/// n = 3: `(T,1) (T,2) (1,2)`; n = 4: `(T,1) (T,2) (T,3) (2,3) (3,1) (1,2)`;
/// otherwise `(T,i)` ascending followed by `(i,j)`, `i < j`, lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lambda2Basis {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Lambda2Basis {
    pub fn new(n: usize) -> Self {
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
        if n == 4 {
            pairs.extend([(2, 3), (3, 1), (1, 2)]);
        } else {
            for i in 1..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
        }
        Lambda2Basis { n, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        let name = |i: usize| {
            if i == 0 {
                "T".to_string()
            } else {
                i.to_string()
            }
        };
        self.pairs
            .iter()
            .map(|&(a, b)| format!("{}^{}", name(a), name(b)))
            .collect()
    }

    /// Λ² Gram matrix induced by the frame Gram matrix `eta`.
    pub fn gram(&self, eta: &Mat) -> Mat {
        let n = self.len();
        Mat::from_fn(n, n, |x, y| {
            let (a, b) = self.pairs[x];
            let (c, d) = self.pairs[y];
            eta[(a, c)] * eta[(b, d)] - eta[(a, d)] * eta[(b, c)]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Riemannian,
    Lorentzian,
    Symmetrized,
}

impl Flavor {
    pub fn is_symmetric(self) -> bool {
        !matches!(self, Flavor::Lorentzian)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureOperatorMatrix {
    pub basis: Lambda2Basis,
    pub entries: Mat,
    pub flavor: Flavor,
    pub f_values: Vec<f64>,
}

/// `M = G⁻¹ Kᵀ` for frame components `rm` and frame Gram matrix `eta`.
pub fn assemble_operator(rm: &RiemannTensor, eta: &Mat, basis: &Lambda2Basis) -> Result<Mat> {
    let n = basis.len();
    let k = Mat::from_fn(n, n, |b, c| {
        let (b1, b2) = basis.pairs[b];
        let (c1, c2) = basis.pairs[c];
        -rm.get(b1, b2, c1, c2)
    });
    let gram_inv = basis.gram(eta).inverse().ok_or(Error::RankDeficientFrame)?;
    Ok(gram_inv.matmul(&k.transpose()))
}

pub fn riemannian_operator_at(
    sp: &StationaryPoint,
    frame: &OrthonormalFrame,
) -> Result<CurvatureOperatorMatrix> {
    let rm = sp.riemann_g().frame_components(&frame.vectors)?;
    let basis = Lambda2Basis::new(sp.dim());
    let entries = assemble_operator(&rm, &frame.gram(&sp.riemannian.g), &basis)?;
    Ok(CurvatureOperatorMatrix {
        basis,
        entries,
        flavor: Flavor::Riemannian,
        f_values: Vec::new(),
    })
}

pub fn lorentzian_operator_at(
    sp: &StationaryPoint,
    frame: &OrthonormalFrame,
) -> Result<CurvatureOperatorMatrix> {
    let rm = sp.riemann_l().frame_components(&frame.vectors)?;
    let basis = Lambda2Basis::new(sp.dim());
    let entries = assemble_operator(&rm, &frame.gram(&sp.lorentzian.g), &basis)?;
    Ok(CurvatureOperatorMatrix {
        basis,
        entries,
        flavor: Flavor::Lorentzian,
        f_values: Vec::new(),
    })
}

/// Build the symmetric operator from `Rm_L` in an adapted frame, with the
/// rotation functions `f` supplying every correction term:
///
/// * `(T,i),(T,j)`: `Rm_L(T,i,T,j) + 2 Σ_m a_im a_jm`
/// * `(T,i),(k,l)`: `Rm_L(T,i,k,l)`
/// * `(i,j),(k,l)`: `−Rm_L(i,j,k,l) + 2(a_il a_jk − a_ik a_jl − 2 a_ij a_kl)`
///
/// where `a_pq = g_L(∇^L_{X_p} T, X_q)` is read off the pairing pattern.
pub fn symmetrized_from_parts(
    rml: &RiemannTensor,
    frame: &OrthonormalFrame,
) -> CurvatureOperatorMatrix {
    let n = frame.dim();
    let basis = Lambda2Basis::new(n);
    let pattern = frame.pairing_pattern();
    let a = |p: usize, q: usize| pattern[(q, p)];
    let big_n = basis.len();
    let mut s = Mat::zeros(big_n, big_n);
    for c in 0..big_n {
        for b in c..big_n {
            let (b1, b2) = basis.pairs[b];
            let (c1, c2) = basis.pairs[c];
            let v = match (b1 == 0, c1 == 0) {
                (true, true) => {
                    rml.get(0, b2, 0, c2) + 2.0 * (1..n).map(|m| a(b2, m) * a(c2, m)).sum::<f64>()
                }
                (true, false) => rml.get(0, b2, c1, c2),
                (false, true) => rml.get(b1, b2, 0, c2),
                (false, false) => {
                    -rml.get(b1, b2, c1, c2)
                        + 2.0
                            * (a(b1, c2) * a(b2, c1)
                                - a(b1, c1) * a(b2, c2)
                                - 2.0 * a(b1, b2) * a(c1, c2))
                }
            };
            s[(c, b)] = v;
            s[(b, c)] = v;
        }
    }
    CurvatureOperatorMatrix {
        basis,
        entries: s,
        flavor: Flavor::Symmetrized,
        f_values: frame.f_values(),
    }
}

pub fn symmetrized_at(
    sp: &StationaryPoint,
    frame: &OrthonormalFrame,
    tol: &Tolerances,
) -> Result<CurvatureOperatorMatrix> {
    if (sp.norm + 1.0).abs() > tol.of(1e-8) {
        return Err(Error::NotUnit { norm: sp.norm });
    }
    let residual = pairing_residual(sp, frame);
    if residual > tol.of(1e-7) {
        return Err(Error::FrameNotAdapted(residual));
    }
    let rml = sp.riemann_l().frame_components(&frame.vectors)?;
    Ok(symmetrized_from_parts(&rml, frame))
}

pub fn riemannian_curvature_operator(
    s: &StationaryStructure,
    frame: &OrthonormalFrame,
) -> Result<CurvatureOperatorMatrix> {
    riemannian_operator_at(&s.at(&frame.point)?, frame)
}

pub fn lorentzian_curvature_operator(
    s: &StationaryStructure,
    frame: &OrthonormalFrame,
) -> Result<CurvatureOperatorMatrix> {
    lorentzian_operator_at(&s.at(&frame.point)?, frame)
}

/// Symmetric operator built from Lorentzian data; `frame` must come from
/// [`crate::frames::adapted_frame`].
pub fn symmetrized_matrix(
    s: &StationaryStructure,
    frame: &OrthonormalFrame,
) -> Result<CurvatureOperatorMatrix> {
    symmetrized_at(&s.at(&frame.point)?, frame, &Tolerances::default())
}
