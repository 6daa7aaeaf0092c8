//! Second-order forward-mode jets: value, gradient and Hessian of a scalar.

use serde::{Deserialize, Serialize};

/// Value, gradient and Hessian of a scalar function of `n` variables at a point.
///
/// The Hessian is stored as a packed upper triangle, so `hessian(i, j)` and
/// `hessian(j, i)` read the same slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    value: f64,
    gradient: Vec<f64>,
    hessian: Vec<f64>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl Jet {
    pub fn constant(n: usize, value: f64) -> Self {
        Jet {
            value,
            gradient: vec![0.0; n],
            hessian: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut jet = Self::constant(n, value);
        jet.gradient[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hessian[packed(self.dim(), i, j)]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.hessian(i, j)).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|v| v.is_finite())
            && self.hessian.iter().all(|v| v.is_finite())
    }

    /// Directional derivative along the coordinate vector `v`.
    pub fn directional(&self, v: &[f64]) -> f64 {
        self.gradient.iter().zip(v).map(|(g, x)| g * x).sum()
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip_linear(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip_linear(other, 1.0, -1.0)
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            gradient: self.gradient.iter().map(|g| c * g).collect(),
            hessian: self.hessian.iter().map(|h| c * h).collect(),
        }
    }

    fn zip_linear(&self, other: &Jet, a: f64, b: f64) -> Jet {
        Jet {
            value: a * self.value + b * other.value,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            hessian: self
                .hessian
                .iter()
                .zip(&other.hessian)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.dim();
        let (a, b) = (self.value, other.value);
        let (ga, gb) = (&self.gradient, &other.gradient);
        let mut hessian = Vec::with_capacity(self.hessian.len());
        for i in 0..n {
            for j in i..n {
                let k = packed(n, i, j);
                hessian.push(
                    a * other.hessian[k] + b * self.hessian[k] + ga[i] * gb[j] + gb[i] * ga[j],
                );
            }
        }
        Jet {
            value: a * b,
            gradient: ga.iter().zip(gb).map(|(x, y)| a * y + b * x).collect(),
            hessian,
        }
    }

    /// Composition `f(self)` given `f(u)`, `f'(u)` and `f''(u)` at `u = self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let n = self.dim();
        let g = &self.gradient;
        let mut hessian = Vec::with_capacity(self.hessian.len());
        for i in 0..n {
            for j in i..n {
                hessian.push(f1 * self.hessian[packed(n, i, j)] + f2 * g[i] * g[j]);
            }
        }
        Jet {
            value: f0,
            gradient: g.iter().map(|x| f1 * x).collect(),
            hessian,
        }
    }

    /// `1/self`; the caller guarantees a nonzero value.
    pub fn recip(&self) -> Jet {
        let u = self.value;
        self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self.mul(&other.recip())
    }

    /// Integer power. A zero base with a negative exponent is the caller's problem.
    pub fn powi(&self, k: i32) -> Jet {
        let u = self.value;
        let n = self.dim();
        match k {
            0 => Jet::constant(n, 1.0),
            1 => self.clone(),
            _ => {
                let kf = f64::from(k);
                self.chain(
                    u.powi(k),
                    kf * u.powi(k - 1),
                    kf * (kf - 1.0) * u.powi(k - 2),
                )
            }
        }
    }

    pub fn ln(&self) -> Jet {
        let u = self.value;
        self.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
    }
}

/// Value and gradient only; cheaper than [`Jet`] where second derivatives
/// are not needed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    value: f64,
    gradient: Vec<f64>,
}

impl Dual {
    pub fn constant(n: usize, value: f64) -> Self {
        Dual {
            value,
            gradient: vec![0.0; n],
        }
    }

    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut d = Self::constant(n, value);
        d.gradient[index] = 1.0;
        d
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.gradient.iter().all(|v| v.is_finite())
    }

    fn zip_linear(&self, other: &Dual, a: f64, b: f64) -> Dual {
        Dual {
            value: a * self.value + b * other.value,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn add(&self, other: &Dual) -> Dual {
        self.zip_linear(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Dual) -> Dual {
        self.zip_linear(other, 1.0, -1.0)
    }

    pub fn neg(&self) -> Dual {
        self.chain(-self.value, -1.0)
    }

    pub fn mul(&self, other: &Dual) -> Dual {
        let (a, b) = (self.value, other.value);
        Dual {
            value: a * b,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(x, y)| a * y + b * x)
                .collect(),
        }
    }

    pub fn div(&self, other: &Dual) -> Dual {
        let u = other.value;
        self.mul(&other.chain(1.0 / u, -1.0 / (u * u)))
    }

    /// Composition `f(self)` given `f(u)` and `f'(u)`.
    pub fn chain(&self, f0: f64, f1: f64) -> Dual {
        Dual {
            value: f0,
            gradient: self.gradient.iter().map(|g| f1 * g).collect(),
        }
    }

    pub fn powi(&self, k: i32) -> Dual {
        let u = self.value;
        match k {
            0 => Dual::constant(self.gradient.len(), 1.0),
            1 => self.clone(),
            _ => self.chain(u.powi(k), f64::from(k) * u.powi(k - 1)),
        }
    }
}
