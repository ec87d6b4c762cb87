//! Pseudoconformal (Appell) change of variables and the time rescalings that
//! bring a pair of Gaussian decay rates `α, β` to the symmetric setting.
//!
//! With `D(t) = α(1-t) + βt` and `λ(t) = √(αβ)/D(t)`,
//! `ũ(x,t) = λ^{n/2} u(λx, tβ/D) e^{(α-β)|x|²/(4iD)}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::wave::WaveState;

/// Decay scales at time 1 (`α`) and time 0 (`β`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

impl AlphaBeta {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(invalid(format!("alpha and beta must be positive, got {alpha}, {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn mu(&self) -> f64 {
        mu_of(self)
    }

    pub fn denom(&self, t: f64) -> f64 {
        self.alpha * (1.0 - t) + self.beta * t
    }

    pub fn lambda(&self, t: f64) -> f64 {
        (self.alpha * self.beta).sqrt() / self.denom(t)
    }

    /// Source time `s = tβ / D(t)` feeding target time `t`.
    pub fn source_time(&self, t: f64) -> f64 {
        t * self.beta / self.denom(t)
    }

    /// Inverse of [`source_time`](Self::source_time): `t = sα / (β(1-s) + αs)`.
    pub fn target_time(&self, s: f64) -> f64 {
        s * self.alpha / (self.beta * (1.0 - s) + self.alpha * s)
    }

    /// Coefficient `c` of the chirp `e^{i c |x|²}` at target time `t`.
    pub fn chirp(&self, t: f64) -> f64 {
        -(self.alpha - self.beta) / (4.0 * self.denom(t))
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha == self.beta
    }
}

/// `μ = 1 / (2αβ)`.
pub fn mu_of(ab: &AlphaBeta) -> f64 {
    1.0 / (2.0 * ab.alpha * ab.beta)
}

/// A transformed slice and the fraction of the source's squared norm that
/// fell outside the sampled window.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilated {
    pub wave: WaveState,
    pub clipped: f64,
}

/// How strictly to treat mass lost off the grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClipPolicy {
    /// Fail with `OutOfDomain` once the clipped fraction exceeds this.
    pub max_clipped: Option<f64>,
}

impl ClipPolicy {
    pub fn strict(max_clipped: f64) -> Self {
        Self { max_clipped: Some(max_clipped) }
    }

    fn check(&self, clipped: f64) -> Result<()> {
        match self.max_clipped {
            Some(tol) if clipped > tol => Err(LabError::OutOfDomain { clipped }),
            _ => Ok(()),
        }
    }
}

/// `out(x) = prefactor · u(λx) · e^{i chirp |x|²}` on the same grid, stamped `time`.
pub fn dilate(
    u: &WaveState,
    lambda: f64,
    prefactor: f64,
    chirp: f64,
    time: f64,
    policy: ClipPolicy,
) -> Result<Dilated> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("dilation factor must be positive, got {lambda}")));
    }
    if lambda == 1.0 && prefactor == 1.0 && chirp == 0.0 {
        let mut wave = u.clone();
        wave.time = time;
        return Ok(Dilated { wave, clipped: 0.0 });
    }
    let g = u.grid;
    let clipped = if lambda < 1.0 {
        let total = u.norm2();
        if total > 0.0 {
            u.mass_outside_box(lambda * g.half_extent()) / total
        } else {
            0.0
        }
    } else {
        0.0
    };
    policy.check(clipped)?;
    let values = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let p = g.point(i);
            let z = u.interpolate([lambda * p[0], lambda * p[1]]);
            let phase = Complex64::from_polar(prefactor, chirp * (p[0] * p[0] + p[1] * p[1]));
            z * phase
        })
        .collect();
    Ok(Dilated { wave: WaveState { grid: g, time, values }, clipped })
}

/// `ũ(·, t)` from the source slice `u(·, s)` with `s = tβ/D(t)`.
///
/// For `α = β` this is the identity on grid nodes.
pub fn appell_wave(u: &WaveState, ab: &AlphaBeta, t: f64, policy: ClipPolicy) -> Result<Dilated> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("target time must lie in [0, 1], got {t}")));
    }
    let s = ab.source_time(t);
    if (u.time - s).abs() > 1e-12 * s.abs().max(1.0) {
        return Err(invalid(format!("source slice is at time {}, target {t} needs {s}", u.time)));
    }
    if ab.is_symmetric() {
        let mut wave = u.clone();
        wave.time = t;
        return Ok(Dilated { wave, clipped: 0.0 });
    }
    let n = u.grid.dim() as f64;
    let lambda = ab.lambda(t);
    dilate(u, lambda, lambda.powf(n / 2.0), ab.chirp(t), t, policy)
}

/// Maps every source slice (times in `[0, 1]`) to its target time.
pub fn appell_family(source: &[WaveState], ab: &AlphaBeta, policy: ClipPolicy) -> Result<Vec<Dilated>> {
    source
        .par_iter()
        .map(|u| {
            let t = ab.target_time(u.time);
            let mut shifted = u.clone();
            // Land exactly on the time the forward map expects.
            shifted.time = ab.source_time(t);
            appell_wave(&shifted, ab, t, policy)
        })
        .collect()
}

/// Closed-form transform of a pointwise solution `u(x, s)` in dimension `dim`.
pub fn appell_pointwise<U>(u: U, ab: AlphaBeta, dim: usize) -> impl Fn(&[f64], f64) -> Complex64
where
    U: Fn(&[f64], f64) -> Complex64,
{
    move |x, t| {
        let lambda = ab.lambda(t);
        let y: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        u(&y, ab.source_time(t)) * Complex64::from_polar(lambda.powf(dim as f64 / 2.0), ab.chirp(t) * r2)
    }
}

/// Transformed magnetic potential, electric potential and forcing.
pub struct AppellPotentials<A, V, F> {
    pub ab: AlphaBeta,
    pub dim: usize,
    pub a: A,
    pub v: V,
    pub f: F,
}

/// Bundle source evaluators into their transformed counterparts.
pub fn appell_potentials<A, V, F>(a: A, v: V, f: F, ab: AlphaBeta, dim: usize) -> AppellPotentials<A, V, F>
where
    A: Fn(&[f64], f64) -> Vec<f64>,
    V: Fn(&[f64], f64) -> Complex64,
    F: Fn(&[f64], f64) -> Complex64,
{
    AppellPotentials { ab, dim, a, v, f }
}

impl<A, V, F> AppellPotentials<A, V, F>
where
    A: Fn(&[f64], f64) -> Vec<f64>,
    V: Fn(&[f64], f64) -> Complex64,
    F: Fn(&[f64], f64) -> Complex64,
{
    fn rescaled(&self, x: &[f64], t: f64) -> (f64, Vec<f64>, f64) {
        if self.ab.is_symmetric() {
            return (1.0, x.to_vec(), t);
        }
        let lambda = self.ab.lambda(t);
        (lambda, x.iter().map(|v| lambda * v).collect(), self.ab.source_time(t))
    }

    /// `Ã(x,t) = λ A(λx, s)`.
    pub fn vector(&self, x: &[f64], t: f64) -> Vec<f64> {
        let (lambda, y, s) = self.rescaled(x, t);
        (self.a)(&y, s).into_iter().map(|c| lambda * c).collect()
    }

    /// `Ṽ(x,t) = λ² V(λx, s)`.
    pub fn scalar(&self, x: &[f64], t: f64) -> Complex64 {
        let (lambda, y, s) = self.rescaled(x, t);
        (self.v)(&y, s) * (lambda * lambda)
    }

    /// `F̃(x,t) = λ^{n/2+2} F(λx, s) e^{(α-β)|x|²/(4iD)}`.
    pub fn forcing(&self, x: &[f64], t: f64) -> Complex64 {
        let (lambda, y, s) = self.rescaled(x, t);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let amp = lambda.powf(self.dim as f64 / 2.0 + 2.0);
        (self.f)(&y, s) * Complex64::from_polar(amp, self.ab.chirp(t) * r2)
    }
}

/// `v(x, t) = 2^{-n/4} ũ(x/√2, (1+t)/2)`: from `[0, 1]` to `[-1, 1]`.
pub fn to_symmetric_interval(u: &WaveState, policy: ClipPolicy) -> Result<Dilated> {
    let n = u.grid.dim() as f64;
    dilate(u, std::f64::consts::FRAC_1_SQRT_2, 2f64.powf(-n / 4.0), 0.0, 2.0 * u.time - 1.0, policy)
}

/// Inverse of [`to_symmetric_interval`].
pub fn from_symmetric_interval(v: &WaveState, policy: ClipPolicy) -> Result<Dilated> {
    let n = v.grid.dim() as f64;
    dilate(v, std::f64::consts::SQRT_2, 2f64.powf(n / 4.0), 0.0, 0.5 * (1.0 + v.time), policy)
}

/// A slice rescaled to the unit time interval, with the rescaled decay rates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTime {
    pub slice: Dilated,
    pub rates: Option<AlphaBeta>,
}

/// `u(x, t) = T^{n/4} v(√T x, Tt)`; reports `α' = α/√T`, `β' = β/√T`.
pub fn scale_to_unit_time(v: &WaveState, big_t: f64, rates: Option<AlphaBeta>, policy: ClipPolicy) -> Result<UnitTime> {
    if !(big_t > 0.0 && big_t.is_finite()) {
        return Err(invalid(format!("time horizon must be positive, got {big_t}")));
    }
    let n = v.grid.dim() as f64;
    let root = big_t.sqrt();
    let slice = dilate(v, root, big_t.powf(n / 4.0), 0.0, v.time / big_t, policy)?;
    let rates = rates.map(|r| AlphaBeta { alpha: r.alpha / root, beta: r.beta / root });
    Ok(UnitTime { slice, rates })
}

/// `‖e^{c|x|²} u‖_{L²}`.
pub fn gaussian_weighted_norm(u: &WaveState, c: f64) -> f64 {
    u.weighted_norm2_raw(c).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::free_gaussian_oracle;
    use crate::wave::SpatialGrid;

    fn gaussian(grid: SpatialGrid, a0: f64, time: f64) -> WaveState {
        WaveState::from_fn(grid, time, |x| free_gaussian_oracle(a0, x[0], time))
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu_of(&AlphaBeta::new(2.0, 2.0).unwrap()), 0.125);
        assert_eq!(mu_of(&AlphaBeta::new(1.0, 2.0).unwrap()), 0.25);
        assert!((mu_of(&AlphaBeta::new(1.0, 5.0).unwrap()) - 0.1).abs() < 1e-16);
        assert!(AlphaBeta::new(0.0, 1.0).is_err());
    }

    #[test]
    fn time_maps_are_inverse() {
        let ab = AlphaBeta::new(4.0, 2.0).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((ab.target_time(ab.source_time(t)) - t).abs() < 1e-15);
        }
        assert_eq!(ab.source_time(0.0), 0.0);
        assert_eq!(ab.source_time(1.0), 1.0);
    }

    #[test]
    fn symmetric_rates_are_the_identity() {
        let g = SpatialGrid::new(1, 10.0, 257).unwrap();
        let ab = AlphaBeta::new(2.0, 2.0).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let u = gaussian(g, 0.5, ab.source_time(t));
            let out = appell_wave(&u, &ab, t, ClipPolicy::default()).unwrap();
            assert_eq!(out.wave.values, u.values);
        }
    }

    #[test]
    fn plain_and_weighted_norms() {
        let g = SpatialGrid::new(1, 20.0, 2049).unwrap();
        let ab = AlphaBeta::new(4.0, 2.0).unwrap();
        let a0 = 0.5;
        let u0 = gaussian(g, a0, 0.0);
        let tu = appell_wave(&u0, &ab, 0.0, ClipPolicy::strict(1e-12)).unwrap();
        let lhs = gaussian_weighted_norm(&tu.wave, 1.0 / (ab.alpha * ab.beta));
        let rhs = gaussian_weighted_norm(&u0, 1.0 / (ab.beta * ab.beta));
        assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
        let t = 0.6;
        let us = gaussian(g, a0, ab.source_time(t));
        let ut = appell_wave(&us, &ab, t, ClipPolicy::strict(1e-12)).unwrap();
        assert!((ut.wave.norm2() / us.norm2() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn clipping_is_reported() {
        let g = SpatialGrid::new(1, 5.0, 201).unwrap();
        let u = WaveState::from_fn(g, 0.0, |x| Complex64::new((-0.1 * x[0] * x[0]).exp(), 0.0));
        let out = to_symmetric_interval(&u, ClipPolicy::default()).unwrap();
        assert!(out.clipped > 1e-3);
        assert!(matches!(to_symmetric_interval(&u, ClipPolicy::strict(1e-6)), Err(LabError::OutOfDomain { .. })));
    }

    #[test]
    fn symmetric_interval_examples() {
        let g = SpatialGrid::new(1, 4.0, 65).unwrap();
        let one = WaveState::from_fn(g, 0.5, |_| Complex64::new(1.0, 0.0));
        let v = to_symmetric_interval(&one, ClipPolicy::default()).unwrap();
        assert_eq!(v.wave.time, 0.0);
        for z in &v.wave.values {
            assert!((z.re - 2f64.powf(-0.25)).abs() < 1e-14);
        }
        let g = SpatialGrid::new(1, 16.0, 2049).unwrap();
        let ab = AlphaBeta::new(3.0, 2.0).unwrap();
        let u = gaussian(g, 0.4, 0.25);
        let v = to_symmetric_interval(&u, ClipPolicy::strict(1e-12)).unwrap();
        let c = 1.0 / (ab.alpha * ab.beta);
        let lhs = gaussian_weighted_norm(&v.wave, c / 2.0);
        let rhs = gaussian_weighted_norm(&u, c);
        assert!((lhs / rhs - 1.0).abs() < 1e-8, "weighted {:e}", lhs / rhs - 1.0);
        assert!((v.wave.norm2() / u.norm2() - 1.0).abs() < 1e-8, "plain {:e}", v.wave.norm2() / u.norm2() - 1.0);
        let back = from_symmetric_interval(&v.wave, ClipPolicy::default()).unwrap();
        assert_eq!(back.wave.time, 0.25);
        let err = back.wave.distance2(&u).sqrt() / u.norm2().sqrt();
        assert!(err < 1e-6, "round trip error {err}");
    }

    #[test]
    fn unit_time_scaling() {
        let g = SpatialGrid::new(1, 12.0, 2049).unwrap();
        let v = WaveState::from_fn(g, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let same = scale_to_unit_time(&v, 1.0, None, ClipPolicy::default()).unwrap();
        assert_eq!(same.slice.wave.values, v.values);
        let rates = AlphaBeta::new(6.0, 3.0).unwrap();
        let out = scale_to_unit_time(&v, 4.0, Some(rates), ClipPolicy::default()).unwrap();
        let r = out.rates.unwrap();
        assert_eq!((r.alpha, r.beta), (3.0, 1.5));
        for (i, z) in out.slice.wave.values.iter().enumerate() {
            let x = g.coord(i);
            assert!((z.re - 2f64.sqrt() * (-4.0 * x * x).exp()).abs() < 1e-7);
        }
        let lhs = gaussian_weighted_norm(&v, 1.0 / 9.0);
        let rhs = gaussian_weighted_norm(&out.slice.wave, 1.0 / (r.beta * r.beta));
        assert!((lhs / rhs - 1.0).abs() < 1e-9);
    }

    fn residual<U: Fn(&[f64], f64) -> Complex64>(
        u: &U,
        v: &dyn Fn(f64, f64) -> Complex64,
        x: f64,
        t: f64,
        h: f64,
    ) -> Complex64 {
        let dt = (u(&[x], t + h) - u(&[x], t - h)) / (2.0 * h);
        let dxx = (u(&[x + h], t) - 2.0 * u(&[x], t) + u(&[x - h], t)) / (h * h);
        dt - Complex64::i() * (dxx + v(x, t) * u(&[x], t))
    }

    #[test]
    fn transformed_free_wave_solves_the_free_equation() {
        let ab = AlphaBeta::new(3.0, 1.5).unwrap();
        let ut = appell_pointwise(|x: &[f64], s| free_gaussian_oracle(0.6, x[0], s), ab, 1);
        let zero = |_: f64, _: f64| Complex64::new(0.0, 0.0);
        for &(x, t) in &[(0.3, 0.2), (-1.1, 0.5), (0.7, 0.8)] {
            let r1 = residual(&ut, &zero, x, t, 2e-3).norm();
            let r2 = residual(&ut, &zero, x, t, 1e-3).norm();
            let ratio = r1 / r2;
            assert!(r2 < 1e-5 && (ratio - 4.0).abs() < 0.3, "x={x} t={t}: {r1} {r2}");
        }
    }

    #[test]
    fn constant_potential_is_rescaled() {
        let ab = AlphaBeta::new(1.0, 4.0).unwrap();
        let c = 0.8;
        let pots = appell_potentials(
            |_: &[f64], _| vec![0.0],
            move |_: &[f64], _| Complex64::new(c, 0.0),
            |_: &[f64], _| Complex64::new(0.0, 0.0),
            ab,
            1,
        );
        let ut = appell_pointwise(
            move |x: &[f64], s| free_gaussian_oracle(0.5, x[0], s) * Complex64::from_polar(1.0, c * s),
            ab,
            1,
        );
        let vt = |x: f64, t: f64| pots.scalar(&[x], t);
        for &(x, t) in &[(0.4, 0.3), (-0.9, 0.6)] {
            let d = ab.denom(t);
            assert!((vt(x, t).re - c * ab.alpha * ab.beta / (d * d)).abs() < 1e-14);
            let r1 = residual(&ut, &vt, x, t, 2e-3).norm();
            let r2 = residual(&ut, &vt, x, t, 1e-3).norm();
            assert!(r2 < 1e-5 && (r1 / r2 - 4.0).abs() < 0.3, "{r1} {r2}");
        }
        assert_eq!(pots.vector(&[1.0], 0.5), vec![0.0]);
        let sym = AlphaBeta::new(2.0, 2.0).unwrap();
        let p = appell_potentials(
            |x: &[f64], _| vec![x[0]],
            |x: &[f64], _| Complex64::new(x[0], 0.0),
            |x: &[f64], _| Complex64::new(x[0], 1.0),
            sym,
            1,
        );
        assert_eq!(p.vector(&[0.3], 0.4), vec![0.3]);
        assert_eq!(p.scalar(&[0.3], 0.4), Complex64::new(0.3, 0.0));
        assert_eq!(p.forcing(&[0.3], 0.4), Complex64::new(0.3, 1.0));
    }
}
