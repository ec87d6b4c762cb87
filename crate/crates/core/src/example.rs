//! Closed-form magnetic example in three dimensions.
//!
//! The vector potential
//!
//! ```text
//! A(x, t) = 2kt/(1+t²) · z/((x²+y²)(1+r²)) · (xz, yz, -(x²+y²))
//! ```
//!
//! is real, satisfies `x·A = 0` and is singular on the z-axis. Together with a
//! real scalar potential it admits the explicit solution
//!
//! ```text
//! u(r, t) = (1+it)^{2k-3/2} (1+r²)^{-k} exp(-(1-it) r² / (4(1+t²)))
//! ```
//!
//! whose weighted norm `‖e^{r²/8} u(±1)‖` is finite.
//!
//! Two scalar potentials are provided. [`eval_potential_v`] pairs naively
//! with `A`; with that pair, `i∂ₜu + Δ_A u − Vu` does not vanish. The
//! sign-consistent pair is `(−A, V♯)` with
//! `V♯ = −(2k/(1+t²) + 6k − 4k(1+k)r²/(1+r²))/(1+r²) − |A|²`
//! ([`eval_potential_v_corrected`]); under [`Convention::SignCorrected`] the
//! residual is `O(h²)`. Both `A` and `−A` share the gauge `x·A = 0` and have
//! a curl orthogonal to `(0, 0, 1)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::quadrature::{adaptive_gk15, composite_gauss, GaussLegendre};

/// Evaluations with `x² + y²` below this are rejected.
pub const AXIS_THRESHOLD: f64 = 1e-12;

/// Exponent of the example; the solution exists for `k > 3/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    k: f64,
}

impl ExampleParams {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 1.5) {
            return Err(invalid(format!("exponent k = {k} must exceed 3/2")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn r2(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Squared distance to the z-axis.
    pub fn rho2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }

    fn shifted(&self, axis: usize, h: f64) -> Self {
        let mut p = *self;
        match axis {
            0 => p.x += h,
            1 => p.y += h,
            _ => p.z += h,
        }
        p
    }
}

/// Which potential pair the residual is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `A` with [`eval_potential_v`], `Δ_A = (∇ − iA)²`; the residual stays `O(1)`.
    Uncorrected,
    /// `−A` and [`eval_potential_v_corrected`]; the residual vanishes.
    #[default]
    SignCorrected,
}

fn time_factor(t: f64, k: f64) -> f64 {
    2.0 * k * t / (1.0 + t * t)
}

fn check_axis(p: &Point3) -> Result<()> {
    let rho2 = p.rho2();
    if !(rho2 >= AXIS_THRESHOLD) {
        return Err(LabError::OnAxis { rho2 });
    }
    Ok(())
}

fn potential_a_unchecked(p: &Point3, t: f64, k: f64) -> [f64; 3] {
    if p.z == 0.0 {
        return [0.0; 3];
    }
    let rho2 = p.rho2();
    let f = time_factor(t, k) * p.z / (rho2 * (1.0 + p.r2()));
    [f * p.x * p.z, f * p.y * p.z, -f * rho2]
}

/// Vector potential of the example.
pub fn eval_potential_a(p: &Point3, t: f64, k: f64) -> Result<[f64; 3]> {
    check_axis(p)?;
    Ok(potential_a_unchecked(p, t, k))
}

fn norm2(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn radial_part(r2: f64, t: f64, k: f64) -> f64 {
    2.0 * k / (1.0 + t * t) + 6.0 * k - 4.0 * k * (1.0 + k) * r2 / (1.0 + r2)
}

fn squared_a(p: &Point3, t: f64, k: f64) -> Result<f64> {
    if p.z == 0.0 {
        return Ok(0.0);
    }
    check_axis(p)?;
    Ok(norm2(potential_a_unchecked(p, t, k)))
}

/// Scalar potential naively paired with `A`: `(2k/(1+t²) + 6k − 4k(1+k)r²/(1+r²) − |A|²)/(1+r²)`.
pub fn eval_potential_v(p: &Point3, t: f64, k: f64) -> Result<f64> {
    let a2 = squared_a(p, t, k)?;
    let r2 = p.r2();
    Ok((radial_part(r2, t, k) - a2) / (1.0 + r2))
}

/// Scalar potential that pairs with `−A` so that `u` solves the equation.
pub fn eval_potential_v_corrected(p: &Point3, t: f64, k: f64) -> Result<f64> {
    let a2 = squared_a(p, t, k)?;
    let r2 = p.r2();
    Ok(-radial_part(r2, t, k) / (1.0 + r2) - a2)
}

/// The explicit solution `u(r, t)`.
pub fn eval_solution_u(r: f64, t: f64, k: f64) -> Complex64 {
    let r2 = r * r;
    let pre = Complex64::new(1.0, t).powf(2.0 * k - 1.5);
    let gauss = (-Complex64::new(1.0, -t) * r2 / (4.0 * (1.0 + t * t))).exp();
    pre * (1.0 + r2).powf(-k) * gauss
}

/// `ln |u(r, t)|`, free of overflow for large `r`.
pub fn log_abs_solution_u(r: f64, t: f64, k: f64) -> f64 {
    let r2 = r * r;
    (2.0 * k - 1.5) * 0.5 * (1.0 + t * t).ln() - k * r2.ln_1p() - r2 / (4.0 * (1.0 + t * t))
}

/// Analytic curl of the example potential; the third component is zero.
pub fn eval_curl_a(p: &Point3, t: f64, k: f64) -> Result<[f64; 3]> {
    check_axis(p)?;
    let r2 = p.r2();
    let f = time_factor(t, k) * 2.0 * p.z / (p.rho2() * (1.0 + r2) * (1.0 + r2));
    Ok([-f * p.y, f * p.x, 0.0])
}

/// Analytic divergence `−2kt/((1+t²)(1+r²))`.
pub fn div_a(p: &Point3, t: f64, k: f64) -> f64 {
    -time_factor(t, k) / (1.0 + p.r2())
}

/// A pointwise residual `i∂ₜu + Δ_A u − Vu` and the sum of the magnitudes of
/// its six terms.
#[derive(Debug, Clone, Copy)]
pub struct Residual {
    pub value: Complex64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.norm()
        } else {
            self.value.norm() / self.scale
        }
    }
}

/// Central-difference residual of `i∂ₜu + (∇ − iA)²u − Vu` for arbitrary
/// closed forms, using `Δ_A = Δ − 2iA·∇ − i div A − |A|²`.
pub fn covariant_residual<U, A, V>(u: U, a: A, v: V, p: &Point3, t: f64, h: f64) -> Residual
where
    U: Fn(&Point3, f64) -> Complex64,
    A: Fn(&Point3, f64) -> [f64; 3],
    V: Fn(&Point3, f64) -> f64,
{
    let i = Complex64::i();
    let u0 = u(p, t);
    let dt = (u(p, t + h) - u(p, t - h)) / (2.0 * h);
    let mut lap = Complex64::new(0.0, 0.0);
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    let mut div = 0.0;
    for axis in 0..3 {
        let fwd = p.shifted(axis, h);
        let bwd = p.shifted(axis, -h);
        let (uf, ub) = (u(&fwd, t), u(&bwd, t));
        lap += (uf - 2.0 * u0 + ub) / (h * h);
        grad[axis] = (uf - ub) / (2.0 * h);
        div += (a(&fwd, t)[axis] - a(&bwd, t)[axis]) / (2.0 * h);
    }
    let av = a(p, t);
    let a_grad = grad[0] * av[0] + grad[1] * av[1] + grad[2] * av[2];
    let terms = [i * dt, lap, -2.0 * i * a_grad, -i * div * u0, -norm2(av) * u0, -v(p, t) * u0];
    Residual { value: terms.iter().sum(), scale: terms.iter().map(|z| z.norm()).sum() }
}

/// Finite-difference residual of the example at `p`.
pub fn pde_residual(p: &Point3, t: f64, k: f64, h: f64, convention: Convention) -> Result<Residual> {
    check_axis(p)?;
    if !(h > 0.0) || p.rho2().sqrt() <= h {
        return Err(LabError::StencilCrossesAxis { h });
    }
    let u = |q: &Point3, s: f64| eval_solution_u(q.r2().sqrt(), s, k);
    let res = match convention {
        Convention::Uncorrected => covariant_residual(
            u,
            |q: &Point3, s| potential_a_unchecked(q, s, k),
            |q: &Point3, s| eval_potential_v(q, s, k).unwrap_or(f64::NAN),
            p,
            t,
            h,
        ),
        Convention::SignCorrected => covariant_residual(
            u,
            |q: &Point3, s| potential_a_unchecked(q, s, k).map(|c| -c),
            |q: &Point3, s| eval_potential_v_corrected(q, s, k).unwrap_or(f64::NAN),
            p,
            t,
            h,
        ),
    };
    Ok(res)
}

/// Sampling region for residual studies: `|p| ≤ radius`, distance to the
/// z-axis at least `axis_margin`, `|t| ≤ 1`.
#[derive(Debug, Clone, Copy)]
pub struct SampleRegion {
    pub radius: f64,
    pub axis_margin: f64,
}

impl Default for SampleRegion {
    fn default() -> Self {
        Self { radius: 3.0, axis_margin: 1.0 }
    }
}

/// Reproducible random sample points `(p, t)`.
pub fn sample_points(n: usize, region: SampleRegion, seed: u64) -> Vec<(Point3, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rad = region.radius;
    let margin2 = region.axis_margin * region.axis_margin;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point3::new(rng.gen_range(-rad..=rad), rng.gen_range(-rad..=rad), rng.gen_range(-rad..=rad));
        let t = rng.gen_range(-1.0..=1.0);
        if p.r2() <= rad * rad && p.rho2() >= margin2 {
            out.push((p, t));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ResidualStudy {
    pub samples: usize,
    pub h: f64,
    pub max_rel_residual: f64,
    /// `log2(Σ|res(h)| / Σ|res(h/2)|)`.
    pub order_estimate: f64,
}

/// Residuals at `samples` random points with steps `h` and `h/2`.
pub fn residual_study(k: f64, samples: usize, h: f64, seed: u64, convention: Convention) -> Result<ResidualStudy> {
    ExampleParams::new(k)?;
    if samples == 0 {
        return Err(invalid("residual study needs at least one sample"));
    }
    if !(h > 0.0 && h < 0.5) {
        return Err(invalid(format!("step h = {h} must lie in (0, 0.5)")));
    }
    let points = sample_points(samples, SampleRegion::default(), seed);
    let rows: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|(p, t)| {
            let coarse = pde_residual(p, *t, k, h, convention)?;
            let fine = pde_residual(p, *t, k, 0.5 * h, convention)?;
            Ok((coarse.relative(), coarse.value.norm(), fine.value.norm()))
        })
        .collect::<Result<_>>()?;
    let max_rel_residual = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let coarse: f64 = rows.iter().map(|r| r.1).sum();
    let fine: f64 = rows.iter().map(|r| r.2).sum();
    Ok(ResidualStudy { samples, h, max_rel_residual, order_estimate: (coarse / fine).log2() })
}

/// Radial quadrature used for the critical norm.
#[derive(Debug, Clone, Copy)]
pub enum RadialQuadrature {
    /// Adaptive Gauss–Kronrod on each geometric segment.
    Adaptive { rel_tol: f64 },
    /// Fixed composite Gauss–Legendre: `panels` panels of `order` nodes per segment.
    Composite { panels: usize, order: usize },
}

impl Default for RadialQuadrature {
    fn default() -> Self {
        Self::Adaptive { rel_tol: 1e-13 }
    }
}

/// Integrand falls below this fraction of its peak at the truncation radius.
pub const RADIAL_TRUNCATION: f64 = 1e-20;

/// `ln(4π r² e^{r²/4} |u|²)` with the two Gaussian exponents combined before
/// evaluation, so that they cancel exactly at `t = ±1`.
fn log_radial_integrand(r: f64, t: f64, k: f64) -> f64 {
    let r2 = r * r;
    let s = 1.0 + t * t;
    (4.0 * std::f64::consts::PI).ln() + 2.0 * r.ln() + (2.0 * k - 1.5) * s.ln() - 2.0 * k * r2.ln_1p()
        + 0.25 * r2 * (1.0 - 2.0 / s)
}

/// `‖e^{r²/8} u(t)‖_{L²(ℝ³)}` from `4π ∫ r² e^{r²/4} |u|² dr`.
pub fn critical_weighted_norm(t: f64, k: f64, quad: RadialQuadrature) -> Result<f64> {
    if t.abs() != 1.0 {
        return Err(invalid(format!("critical norm is taken at t = ±1, got {t}")));
    }
    if !(k > 0.75) {
        return Err(invalid(format!("k = {k} must exceed 3/4 for integrability")));
    }
    let lf = |r: f64| log_radial_integrand(r, t, k);

    // Locate the peak on a logarithmic scan, then walk outward to the cutoff.
    let mut peak = f64::NEG_INFINITY;
    let mut r_peak = 1.0;
    let mut r = 1e-3;
    while r < 1e3 {
        let v = lf(r);
        if v > peak {
            peak = v;
            r_peak = r;
        }
        r *= 1.05;
    }
    let floor = peak + RADIAL_TRUNCATION.ln();
    let mut breaks = vec![0.0, 2.0 * r_peak];
    let mut edge = 2.0 * r_peak;
    while lf(edge) > floor {
        edge *= 2.0;
        if edge > 1e150 {
            return Err(LabError::QuadratureNotConverged { estimate: f64::INFINITY, error: f64::INFINITY });
        }
        breaks.push(edge);
    }

    let f = |r: f64| if r == 0.0 { 0.0 } else { lf(r).exp() };
    let mut total: f64 = 0.0;
    match quad {
        RadialQuadrature::Adaptive { rel_tol } => {
            for w in breaks.windows(2) {
                let res = adaptive_gk15(f, w[0], w[1], 0.0, rel_tol, 4000)
                    .or_else(|_| adaptive_gk15(f, w[0], w[1], rel_tol * total.max(1e-300), rel_tol, 4000))?;
                total += res.value;
            }
        }
        RadialQuadrature::Composite { panels, order } => {
            let rule = GaussLegendre::new(order.max(1));
            for w in breaks.windows(2) {
                total += composite_gauss(&rule, w[0], w[1], panels.max(1), f);
            }
        }
    }
    // Beyond the cutoff the integrand is c·r^{2-4k}(1 + O(r⁻²)).
    total += f(edge) * edge / (4.0 * k - 3.0);
    if !total.is_finite() {
        return Err(LabError::QuadratureNotConverged { estimate: total, error: f64::INFINITY });
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: f64 = 2.0;

    #[test]
    fn potential_at_reference_point() {
        let a = eval_potential_a(&Point3::new(1.0, 0.0, 1.0), 1.0, 2.0).unwrap();
        assert!((a[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(a[1], 0.0);
        assert!((a[2] + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn potential_vanishes_on_plane_and_at_t0() {
        let p = Point3::new(0.3, -1.2, 0.0);
        assert_eq!(eval_potential_a(&p, 0.7, K).unwrap(), [0.0; 3]);
        let q = Point3::new(0.3, -1.2, 2.0);
        assert!(eval_potential_a(&q, 0.0, K).unwrap().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn axis_is_rejected() {
        let p = Point3::new(0.0, 0.0, 1.0);
        assert!(matches!(eval_potential_a(&p, 0.5, K), Err(LabError::OnAxis { .. })));
        assert!(matches!(eval_curl_a(&p, 0.5, K), Err(LabError::OnAxis { .. })));
        assert!(matches!(eval_potential_v(&p, 0.5, K), Err(LabError::OnAxis { .. })));
        // z = 0 makes |A|² = 0 exact, so V is defined at the origin.
        assert!((eval_potential_v(&Point3::new(0.0, 0.0, 0.0), 0.0, K).unwrap() - 16.0).abs() < 1e-14);
    }

    #[test]
    fn potential_v_large_time_limit() {
        let p = Point3::new(1.0, 0.0, 0.0);
        let v = eval_potential_v(&p, 1e9, K).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn v_plus_a2_is_radial() {
        let p = Point3::new(0.6, 0.8, 1.1);
        let q = Point3::new(-1.0, 0.1, 0.9);
        let r2 = p.r2();
        let q = Point3::new(q.x * (r2 / q.r2()).sqrt(), q.y * (r2 / q.r2()).sqrt(), q.z * (r2 / q.r2()).sqrt());
        let t = 0.4;
        let s = |p: &Point3| {
            let a2 = norm2(eval_potential_a(p, t, K).unwrap());
            eval_potential_v(p, t, K).unwrap() + a2 / (1.0 + p.r2())
        };
        assert!((s(&p) - s(&q)).abs() < 1e-12);
    }

    #[test]
    fn solution_reference_values() {
        let u0 = eval_solution_u(0.0, 0.7, K);
        let expect = Complex64::new(1.0, 0.7).powf(2.0 * K - 1.5);
        assert!((u0 - expect).norm() < 1e-15);
        let u = eval_solution_u(1.0, 0.0, K);
        assert!((u.re - 0.25 * (-0.25f64).exp()).abs() < 1e-15);
        assert!((u.re - 0.194_700).abs() < 1e-6);
        for &t in &[-1.0, 1.0] {
            for &r in &[0.0, 0.5, 2.0, 4.0] {
                let m2 = eval_solution_u(r, t, K).norm_sqr();
                let e = 2f64.powf(2.0 * K - 1.5) * (1.0 + r * r).powf(-2.0 * K) * (-r * r / 4.0).exp();
                assert!((m2 - e).abs() < 1e-14 * e.max(1e-300), "r={r} t={t}");
                assert!((log_abs_solution_u(r, t, K) - m2.sqrt().ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cronstrom_gauge_holds_pointwise() {
        for (p, t) in sample_points(200, SampleRegion { radius: 3.0, axis_margin: 1e-3 }, 11) {
            let a = eval_potential_a(&p, t, K).unwrap();
            let scale = norm2(a).sqrt() * p.r2().sqrt();
            assert!(p.dot(a).abs() <= 1e-15 * scale.max(1.0));
        }
    }

    #[test]
    fn curl_matches_finite_differences() {
        let t = 0.6;
        let a = |p: Point3| eval_potential_a(&p, t, K).unwrap();
        let fd_curl = |p: Point3, h: f64| {
            let d = |i: usize, j: usize| (a(p.shifted(j, h))[i] - a(p.shifted(j, -h))[i]) / (2.0 * h);
            [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
        };
        let p = Point3::new(0.7, -0.4, 1.3);
        let exact = eval_curl_a(&p, t, K).unwrap();
        assert_eq!(exact[2], 0.0);
        let err = |h: f64| {
            let c = fd_curl(p, h);
            (0..3).map(|i| (c[i] - exact[i]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e1 < 1e-3);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn divergence_matches_finite_differences() {
        let p = Point3::new(1.1, 0.4, -0.8);
        let t = -0.3;
        let h = 1e-4;
        let fd: f64 = (0..3)
            .map(|ax| {
                (eval_potential_a(&p.shifted(ax, h), t, K).unwrap()[ax]
                    - eval_potential_a(&p.shifted(ax, -h), t, K).unwrap()[ax])
                    / (2.0 * h)
            })
            .sum();
        assert!((fd - div_a(&p, t, K)).abs() < 1e-7);
    }

    #[test]
    fn residual_plumbing_is_exact_for_constants() {
        let r = covariant_residual(
            |_: &Point3, _| Complex64::new(1.0, 0.0),
            |_: &Point3, _| [0.0; 3],
            |_: &Point3, _| 0.0,
            &Point3::new(0.2, 0.3, 0.4),
            0.1,
            1e-3,
        );
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn first_order_term_vanishes_for_radial_u() {
        let p = Point3::new(1.0, 1.0, 1.0);
        let t = 0.3;
        let h = 1e-5;
        let a = eval_potential_a(&p, t, K).unwrap();
        let mut a_grad = Complex64::new(0.0, 0.0);
        for ax in 0..3 {
            let g = (eval_solution_u(p.shifted(ax, h).r2().sqrt(), t, K)
                - eval_solution_u(p.shifted(ax, -h).r2().sqrt(), t, K))
                / (2.0 * h);
            a_grad += g * a[ax];
        }
        assert!(a_grad.norm() < 1e-9, "{a_grad}");
    }

    #[test]
    fn corrected_residual_is_second_order() {
        let p = Point3::new(1.0, 1.0, 1.0);
        let r1 = pde_residual(&p, 0.3, K, 1e-2, Convention::SignCorrected).unwrap();
        let r2 = pde_residual(&p, 0.3, K, 5e-3, Convention::SignCorrected).unwrap();
        let ratio = r1.value.norm() / r2.value.norm();
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn uncorrected_residual_does_not_converge() {
        let p = Point3::new(1.0, 1.0, 1.0);
        let r1 = pde_residual(&p, 0.3, K, 1e-2, Convention::Uncorrected).unwrap();
        let r2 = pde_residual(&p, 0.3, K, 5e-3, Convention::Uncorrected).unwrap();
        assert!(r2.relative() > 0.1);
        assert!((r1.value.norm() / r2.value.norm() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn residual_stencil_near_axis_is_rejected() {
        let p = Point3::new(1e-3, 0.0, 1.0);
        assert!(matches!(
            pde_residual(&p, 0.3, K, 1e-2, Convention::SignCorrected),
            Err(LabError::StencilCrossesAxis { .. })
        ));
    }

    #[test]
    fn residual_study_rejects_bad_input() {
        assert!(residual_study(1.0, 10, 1e-3, 0, Convention::SignCorrected).is_err());
        assert!(residual_study(2.0, 0, 1e-3, 0, Convention::SignCorrected).is_err());
    }

    #[test]
    fn critical_norm_reference_value() {
        let n = critical_weighted_norm(1.0, K, RadialQuadrature::default()).unwrap();
        let expect = 2f64.powf(2.5) * 4.0 * std::f64::consts::PI * std::f64::consts::PI / 32.0;
        assert!((n * n - expect).abs() < 1e-10 * expect, "{} vs {}", n * n, expect);
        let m = critical_weighted_norm(-1.0, K, RadialQuadrature::default()).unwrap();
        assert!((n - m).abs() < 1e-12 * n);
    }

    #[test]
    fn critical_norm_requires_endpoint_time() {
        assert!(critical_weighted_norm(0.5, K, RadialQuadrature::default()).is_err());
        assert!(critical_weighted_norm(1.0, 0.7, RadialQuadrature::default()).is_err());
    }

    #[test]
    fn critical_norm_matches_beta_integral_across_k() {
        // 4π 2^{2k-3/2} ∫ r²(1+r²)^{-2k} dr = 4π 2^{2k-3/2} (√π/4) Γ(2k-3/2)/Γ(2k)
        use statrs::function::gamma::gamma;
        let closed = |k: f64| {
            4.0 * std::f64::consts::PI * 2f64.powf(2.0 * k - 1.5) * std::f64::consts::PI.sqrt() / 4.0
                * gamma(2.0 * k - 1.5)
                / gamma(2.0 * k)
        };
        let ks = [1.0, 1.2, 1.5, 1.6, 2.0, 3.0, 5.0];
        let vals: Vec<f64> =
            ks.iter().map(|&k| critical_weighted_norm(1.0, k, RadialQuadrature::default()).unwrap()).collect();
        for (k, v) in ks.iter().zip(&vals) {
            let c = closed(*k);
            assert!((v * v - c).abs() < 1e-9 * c, "k={k}: {} vs {c}", v * v);
        }
        // Decreasing below k ≈ 1.7, increasing above: the 2^{2k} prefactor wins.
        assert!(vals[..4].windows(2).all(|w| w[1] < w[0]), "{vals:?}");
        assert!(vals[4..].windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }
}
