//! Seeded generators of stationary structures and brute-force oracles.
//!
//! Every generated metric has components depending on the first coordinate
//! `t` only, and the Killing field has constant components along the
//! remaining coordinates, so `T` is Killing by construction. The metric is
//! first built as a Riemannian metric and then flipped along `T`.

pub mod oracle;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::metric::{Chart, MetricSpec, Signature, DEFAULT_CHART_MARGIN};
use crate::stationary::{conformal_normalize, StationaryStructure};
use crate::topology::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum Family {
    /// `w_0(t)² dt² + Σ w_i(t)² dx_i² + 2 h(t) dx_1 dx_2`.
    WarpedRotational,
    /// A three-dimensional warped factor times a flat factor `Σ dz_k²`.
    ProductWithFlat { flat_dims: usize },
    /// `dt² + sin²t dx² + s² cos²t dy²` on `t ∈ (0, π/2)` with `T = ∂_x + ∂_y`.
    S3Squashed { squash: f64 },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::WarpedRotational => "warped-rotational",
            Family::ProductWithFlat { .. } => "product-with-flat",
            Family::S3Squashed { .. } => "s3-squashed",
        }
    }
}

/// Coefficient ranges for warp functions `c₀ + c₁ sin t + c₂ cos t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarpRange {
    pub c0: (f64, f64),
    pub c1_max: f64,
    pub c2_max: f64,
}

impl Default for WarpRange {
    fn default() -> Self {
        WarpRange {
            c0: (1.0, 2.0),
            c1_max: 0.4,
            c2_max: 0.4,
        }
    }
}

impl WarpRange {
    fn lower_bound(&self) -> f64 {
        self.c0.0 - self.c1_max - self.c2_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorRecipe {
    pub seed: u64,
    pub dimension: usize,
    pub family: Family,
    pub warp: WarpRange,
    /// Range of `|α|` for the constant Killing coefficients.
    pub killing: (f64, f64),
    pub unit: bool,
}

impl GeneratorRecipe {
    pub fn new(seed: u64, dimension: usize, family: Family) -> Self {
        GeneratorRecipe {
            seed,
            dimension,
            family,
            warp: WarpRange::default(),
            killing: (0.5, 1.5),
            unit: true,
        }
    }

    /// Recipe with dimension in `{3, 4, 5}` and family both drawn from the seed.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d);
        let dimension = rng.gen_range(3..=5);
        let family = if dimension > 3 && rng.gen_bool(0.5) {
            Family::ProductWithFlat {
                flat_dims: dimension - 3,
            }
        } else {
            Family::WarpedRotational
        };
        GeneratorRecipe::new(seed, dimension, family)
    }
}

fn t() -> Expr {
    Expr::var(0)
}

fn sin(e: &Expr) -> Expr {
    Expr::call(Func::Sin, e)
}

fn cos(e: &Expr) -> Expr {
    Expr::call(Func::Cos, e)
}

fn warp(rng: &mut ChaCha8Rng, r: &WarpRange) -> Expr {
    let c0 = rng.gen_range(r.c0.0..=r.c0.1);
    let c1 = rng.gen_range(-r.c1_max..=r.c1_max);
    let c2 = rng.gen_range(-r.c2_max..=r.c2_max);
    Expr::num(c0)
        .add(&Expr::num(c1).mul(&sin(&t())))
        .add(&Expr::num(c2).mul(&cos(&t())))
}

fn killing_coefficient(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    let v = rng.gen_range(range.0..=range.1);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn coordinate_names(n: usize) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain((1..n).map(|i| format!("x{i}")))
        .collect()
}

/// Riemannian metric and Killing components of a warped family.
fn warped(recipe: &GeneratorRecipe, warped_dims: usize) -> Result<(MetricSpec, Vec<Expr>)> {
    let n = recipe.dimension;
    let r = &recipe.warp;
    if r.lower_bound() <= 0.0 || r.c0.0 > r.c0.1 {
        return Err(Error::Composition(
            "warp coefficient range admits zeros on the chart".into(),
        ));
    }
    if recipe.killing.0 <= 0.0 || recipe.killing.0 > recipe.killing.1 {
        return Err(Error::Composition(
            "Killing coefficient range must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let warps: Vec<Expr> = (0..warped_dims).map(|_| warp(&mut rng, r)).collect();
    // Cross term bounded by a quarter of the smallest warp product.
    let bound = 0.25 * r.lower_bound().powi(2);
    let h = if warped_dims >= 3 {
        let h0 = rng.gen_range(-0.5..=0.5) * bound;
        let h1 = rng.gen_range(-0.5..=0.5) * bound;
        Expr::num(h0).add(&Expr::num(h1).mul(&sin(&t())))
    } else {
        Expr::zero()
    };
    let killing: Vec<Expr> = std::iter::once(Expr::zero())
        .chain((1..n).map(|_| Expr::num(killing_coefficient(&mut rng, recipe.killing))))
        .collect();
    let chart = Chart {
        coords: coordinate_names(n),
        intervals: std::iter::once((0.0, 3.0))
            .chain((1..n).map(|_| (0.0, 2.0 * PI)))
            .collect(),
        margin: DEFAULT_CHART_MARGIN,
    };
    let spec = MetricSpec::new(chart, Signature::Riemannian, |i, j| match (i, j) {
        (i, j) if i == j && i < warped_dims => warps[i].powi(2),
        (i, j) if i == j => Expr::num(1.0),
        (1, 2) => h.clone(),
        _ => Expr::zero(),
    })?;
    Ok((spec, killing))
}

fn s3_squashed(squash: f64) -> Result<(MetricSpec, Vec<Expr>)> {
    if squash.is_nan() || squash <= 0.0 {
        return Err(Error::Composition("squash factor must be positive".into()));
    }
    let chart = Chart {
        coords: vec!["t".into(), "x".into(), "y".into()],
        intervals: vec![(0.0, FRAC_PI_2), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
        margin: DEFAULT_CHART_MARGIN,
    };
    let spec = MetricSpec::new(chart, Signature::Riemannian, |i, j| match (i, j) {
        (0, 0) => Expr::num(1.0),
        (1, 1) => sin(&t()).powi(2),
        (2, 2) if squash == 1.0 => cos(&t()).powi(2),
        (2, 2) => Expr::num(squash * squash).mul(&cos(&t()).powi(2)),
        _ => Expr::zero(),
    })?;
    Ok((spec, vec![Expr::zero(), Expr::num(1.0), Expr::num(1.0)]))
}

/// Build the stationary structure described by `recipe`.
pub fn generate(recipe: &GeneratorRecipe) -> Result<StationaryStructure> {
    let n = recipe.dimension;
    let (riemannian, killing) = match recipe.family {
        Family::WarpedRotational => {
            check_dimension(n, 2)?;
            warped(recipe, n)?
        }
        Family::ProductWithFlat { flat_dims } => {
            if flat_dims + 3 != n {
                return Err(Error::DimensionMismatch(format!(
                    "product-with-flat needs dimension 3 + {flat_dims}, recipe has {n}"
                )));
            }
            check_dimension(n, 3)?;
            warped(recipe, 3)?
        }
        Family::S3Squashed { squash } => {
            if n != 3 {
                return Err(Error::DimensionMismatch(format!(
                    "s3-squashed is three-dimensional, recipe has {n}"
                )));
            }
            s3_squashed(squash)?
        }
    };
    let s = StationaryStructure::from_riemannian(riemannian, killing, false)?;
    let s = if recipe.unit {
        conformal_normalize(&s)?
    } else {
        s
    };
    check_timelike(&s)?;
    Ok(s)
}

fn check_dimension(n: usize, min: usize) -> Result<()> {
    if n < min || n > crate::metric::MAX_DIMENSION {
        return Err(Error::DimensionMismatch(format!(
            "dimension {n} not supported by this family"
        )));
    }
    Ok(())
}

/// Sample `g_L(T,T) < 0` over a coarse grid of the chart interior.
fn check_timelike(s: &StationaryStructure) -> Result<()> {
    let chart = &s.lorentzian().chart;
    let mut sizes = vec![2; chart.dim()];
    sizes[0] = 7;
    for p in (Grid { sizes }).points(chart)? {
        s.at(&p)?;
    }
    Ok(())
}
