use super::profile::WeightProfile;
use crate::error::{invalid, LabError, Result};

/// Smaller positive root of `μ = R / (4 (1 + R²))`, in the cancellation-free
/// form `8μ / (1 + √(1 - 64μ²))`.
pub fn smallest_root_r(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid(format!("mu must be positive, got {mu}")));
    }
    let disc = 1.0 - 64.0 * mu * mu;
    if disc < 0.0 {
        return Err(LabError::NoRealRoot { mu });
    }
    Ok(8.0 * mu / (1.0 + disc.sqrt()))
}

/// `a(t) = R / (4 (1 + R² t²))` sampled on `m` symmetric nodes.
pub fn limit_profile(mu: f64, m: usize) -> Result<WeightProfile> {
    let r = smallest_root_r(mu)?;
    WeightProfile::from_fn(m, |t| r / (4.0 * (1.0 + r * r * t * t)))
}

/// The sharp weight on `[0, 1]` for decay rates `α` (at time 1) and `β` (at time 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyProfile {
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
}

impl HardyProfile {
    pub fn eval(&self, t: f64) -> f64 {
        let (a, b, r) = (self.alpha, self.beta, self.r);
        let p = a * t + b * (1.0 - t);
        let q = a * t - b * (1.0 - t);
        a * b * r / (2.0 * p * p + 2.0 * r * r * q * q)
    }

    pub fn mu(&self) -> f64 {
        1.0 / (2.0 * self.alpha * self.beta)
    }

    /// `[a(0), a(1)]`, which equal `[1/β², 1/α²]`.
    pub fn endpoints(&self) -> [f64; 2] {
        [self.eval(0.0), self.eval(1.0)]
    }
}

fn check_rates(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(invalid(format!("alpha and beta must be positive, got {alpha}, {beta}")));
    }
    Ok(())
}

/// Requires `αβ ≥ 4`; otherwise no real root exists.
pub fn decay_profile(alpha: f64, beta: f64) -> Result<HardyProfile> {
    check_rates(alpha, beta)?;
    let r = smallest_root_r(1.0 / (2.0 * alpha * beta))?;
    Ok(HardyProfile { alpha, beta, r })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardyVerdict {
    /// `αβ < 4`: the solution must vanish identically.
    MustVanish,
    Profile(HardyProfile),
}

pub fn hardy_verdict(alpha: f64, beta: f64) -> Result<HardyVerdict> {
    check_rates(alpha, beta)?;
    if alpha * beta < 4.0 {
        return Ok(HardyVerdict::MustVanish);
    }
    Ok(HardyVerdict::Profile(decay_profile(alpha, beta)?))
}
