/// Numerical tolerances. One scale factor moves all of them together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Linear algebra: inverses, orthonormality, positivity threshold.
    pub linalg: f64,
    /// Residuals of algebraic identities (Bianchi, symmetries).
    pub identity: f64,
    /// Comparisons against finite-difference oracles.
    pub oracle: f64,
    /// Scale factor applied to the defaults.
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::scaled(1.0)
    }
}

impl Tolerances {
    pub const MIN_SCALE: f64 = 1e-2;
    pub const MAX_SCALE: f64 = 1e2;

    pub fn scaled(scale: f64) -> Self {
        Tolerances {
            linalg: 1e-10 * scale,
            identity: 1e-8 * scale,
            oracle: 1e-6 * scale,
            scale,
        }
    }

    /// Scale `value` by the configured factor.
    pub fn of(&self, value: f64) -> f64 {
        value * self.scale
    }
}
