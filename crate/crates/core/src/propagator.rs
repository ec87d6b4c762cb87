//! Crank–Nicolson evolution of `∂ₜu = i(Δ_A + V)u` on `[-L, L]^n`, `n ∈ {1, 2}`,
//! with Dirichlet walls, plus weighted-norm traces `H(t) = ‖e^{a(t)|x|²}u(t)‖²`.
//!
//! The magnetic Laplacian `Δ - 2iA·∇ - i div A - |A|²` is discretized as
//! `Δ_h - i(diag(A) D + D diag(A)) - |A|²` with `D` the central difference, so
//! the operator is Hermitian for real potentials and each step is unitary up to
//! the linear-solver tolerance.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::wave::{SpatialGrid, WaveState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Electromagnetic data for the evolution. Components beyond the grid
/// dimension are ignored.
pub trait FieldModel: Sync {
    fn vector_potential(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let _ = (x, t);
        [0.0, 0.0]
    }

    fn scalar_potential(&self, x: [f64; 2], t: f64) -> Complex64 {
        let _ = (x, t);
        ZERO
    }

    /// Whether the potentials change in time (the operator is then rebuilt every step).
    fn is_time_dependent(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FreeField;

impl FieldModel for FreeField {}

/// `A = 0`, `V ≡ c` (possibly complex).
#[derive(Debug, Clone, Copy)]
pub struct ConstantPotential(pub Complex64);

impl FieldModel for ConstantPotential {
    fn scalar_potential(&self, _x: [f64; 2], _t: f64) -> Complex64 {
        self.0
    }
}

/// Uniform field `B₀` in the symmetric gauge `A = (B₀/2)(-y, x)`.
#[derive(Debug, Clone, Copy)]
pub struct UniformMagnetic {
    pub b0: f64,
}

impl FieldModel for UniformMagnetic {
    fn vector_potential(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
        [-0.5 * self.b0 * x[1], 0.5 * self.b0 * x[0]]
    }
}

/// Potentials from closures.
pub struct FnField<A, V> {
    pub a: A,
    pub v: V,
    pub time_dependent: bool,
}

impl<A, V> FieldModel for FnField<A, V>
where
    A: Fn([f64; 2], f64) -> [f64; 2] + Sync,
    V: Fn([f64; 2], f64) -> Complex64 + Sync,
{
    fn vector_potential(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        (self.a)(x, t)
    }

    fn scalar_potential(&self, x: [f64; 2], t: f64) -> Complex64 {
        (self.v)(x, t)
    }

    fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }
}

/// Spatial grid plus time stepping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub half_extent: f64,
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_power_of_two() || (self.n % 2 == 1 && self.n >= 65)) || self.n < 8 {
            return Err(invalid(format!(
                "points per axis must be a power of two or odd and at least 65, got {}",
                self.n
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("time step must be positive, got {}", self.dt)));
        }
        SpatialGrid::new(self.dim, self.half_extent, self.n).map(|_| ())
    }

    pub fn spatial(&self) -> Result<SpatialGrid> {
        self.validate()?;
        SpatialGrid::new(self.dim, self.half_extent, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnOptions {
    /// Relative residual each linear solve must reach.
    pub solve_tol: f64,
    pub max_iterations: usize,
    /// Largest tolerated share of `‖u‖²` in the boundary layer.
    pub boundary_mass_tol: f64,
    /// Boundary layer width as a fraction of the points per axis (at least two nodes).
    pub boundary_layer: f64,
    /// Keep every `record_every`-th state (the first and last are always kept).
    pub record_every: usize,
}

impl Default for CnOptions {
    fn default() -> Self {
        Self { solve_tol: 1e-12, max_iterations: 1000, boundary_mass_tol: 1e-8, boundary_layer: 0.02, record_every: 1 }
    }
}

/// Discrete `Δ_A + V` at one time: node diagonal and forward links per axis.
#[derive(Debug, Clone)]
struct Operator {
    diag: Vec<Complex64>,
    /// `links[axis][i] = H[i, i + e_axis]`; `H[i + e, i]` is its conjugate.
    links: [Vec<Complex64>; 2],
}

fn is_interior(grid: &SpatialGrid, idx: usize) -> bool {
    let n = grid.points_per_axis();
    let [i, j] = grid.unflatten(idx);
    let inside = |k: usize| k > 0 && k < n - 1;
    inside(i) && (grid.dim() == 1 || inside(j))
}

impl Operator {
    fn build<F: FieldModel + ?Sized>(grid: &SpatialGrid, field: &F, t: f64) -> Self {
        let len = grid.len();
        let n = grid.points_per_axis();
        let dx = grid.spacing();
        let inv2 = 1.0 / (dx * dx);
        let a: Vec<[f64; 2]> = (0..len).map(|i| field.vector_potential(grid.point(i), t)).collect();
        let dim = grid.dim();
        let diag = (0..len)
            .map(|i| {
                let a2: f64 = a[i][..dim].iter().map(|c| c * c).sum();
                Complex64::new(-2.0 * dim as f64 * inv2 - a2, 0.0) + field.scalar_potential(grid.point(i), t)
            })
            .collect();
        let stride = [1, n];
        let mut links = [vec![ZERO; len], vec![ZERO; len]];
        for (axis, link) in links.iter_mut().enumerate().take(dim) {
            for (i, l) in link.iter_mut().enumerate() {
                let k = grid.unflatten(i)[axis];
                if k + 1 < n {
                    let s = a[i][axis] + a[i + stride[axis]][axis];
                    *l = Complex64::new(inv2, -s / (2.0 * dx));
                }
            }
        }
        Self { diag, links }
    }

    /// `H u` on interior nodes; boundary rows are zero.
    fn apply(&self, grid: &SpatialGrid, u: &[Complex64], out: &mut [Complex64]) {
        let n = grid.points_per_axis();
        let stride = [1, n];
        let dim = grid.dim();
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            if !is_interior(grid, i) {
                *o = ZERO;
                return;
            }
            let mut acc = self.diag[i] * u[i];
            for axis in 0..dim {
                let s = stride[axis];
                acc += self.links[axis][i] * u[i + s] + self.links[axis][i - s].conj() * u[i - s];
            }
            *o = acc;
        });
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// One Crank–Nicolson propagator for a fixed grid, field and step.
pub struct CrankNicolson<'a, F: FieldModel + ?Sized> {
    grid: SpatialGrid,
    field: &'a F,
    dt: f64,
    opts: CnOptions,
    cached: Option<Operator>,
    layer: usize,
}

impl<'a, F: FieldModel + ?Sized> CrankNicolson<'a, F> {
    pub fn new(grid: SpatialGrid, field: &'a F, dt: f64, opts: CnOptions) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        let n = grid.points_per_axis();
        let layer = ((opts.boundary_layer * n as f64).ceil() as usize).max(2).min(n / 2);
        let cached = (!field.is_time_dependent()).then(|| Operator::build(&grid, field, 0.0));
        Ok(Self { grid, field, dt, opts, cached, layer })
    }

    /// Share of `‖u‖²` within the boundary layer.
    pub fn boundary_fraction(&self, u: &WaveState) -> f64 {
        let mut edge = 0.0;
        let mut total = 0.0;
        for (i, z) in u.values.iter().enumerate() {
            let m = self.grid.trapezoid_weight(i) * z.norm_sqr();
            total += m;
            if self.grid.in_boundary_layer(i, self.layer) {
                edge += m;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    fn check_boundary(&self, u: &WaveState) -> Result<()> {
        let fraction = self.boundary_fraction(u);
        if fraction > self.opts.boundary_mass_tol {
            return Err(LabError::BoundaryMassExceeded { t: u.time, fraction });
        }
        Ok(())
    }

    /// Advance by one step; potentials are taken at the midpoint time.
    pub fn step(&self, u: &WaveState) -> Result<WaveState> {
        if u.grid != self.grid {
            return Err(invalid("state lives on a different grid"));
        }
        let built;
        let op = match &self.cached {
            Some(op) => op,
            None => {
                built = Operator::build(&self.grid, self.field, u.time + 0.5 * self.dt);
                &built
            }
        };
        let half = Complex64::new(0.0, 0.5 * self.dt);
        let mut hu = vec![ZERO; u.values.len()];
        op.apply(&self.grid, &u.values, &mut hu);
        let rhs: Vec<Complex64> = u
            .values
            .iter()
            .zip(&hu)
            .enumerate()
            .map(|(i, (v, h))| if is_interior(&self.grid, i) { v + half * h } else { ZERO })
            .collect();
        let next = if self.grid.dim() == 1 {
            self.solve_tridiagonal(op, half, &rhs)?
        } else {
            self.solve_bicgstab(op, half, &rhs, &u.values)?
        };
        let out = WaveState { grid: self.grid, time: u.time + self.dt, values: next };
        self.check_boundary(&out)?;
        Ok(out)
    }

    /// `(I - half·H) x`.
    fn system(&self, op: &Operator, half: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        op.apply(&self.grid, x, out);
        for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
            *o = if is_interior(&self.grid, i) { xi - half * *o } else { *xi };
        }
    }

    fn relative_residual(&self, op: &Operator, half: Complex64, x: &[Complex64], rhs: &[Complex64]) -> f64 {
        let mut ax = vec![ZERO; x.len()];
        self.system(op, half, x, &mut ax);
        let r: Vec<Complex64> = ax.iter().zip(rhs).map(|(a, b)| a - b).collect();
        let scale = norm(rhs);
        if scale == 0.0 {
            norm(&r)
        } else {
            norm(&r) / scale
        }
    }

    fn solve_tridiagonal(&self, op: &Operator, half: Complex64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = rhs.len();
        let m = n - 2;
        let link = &op.links[0];
        let sub = |j: usize| -half * link[j - 1].conj();
        let sup = |j: usize| -half * link[j];
        let mid = |j: usize| Complex64::new(1.0, 0.0) - half * op.diag[j];
        let mut c = vec![ZERO; m];
        let mut d = vec![ZERO; m];
        for k in 0..m {
            let j = k + 1;
            let denom = if k == 0 { mid(j) } else { mid(j) - sub(j) * c[k - 1] };
            c[k] = if k + 1 < m { sup(j) / denom } else { ZERO };
            d[k] = if k == 0 { rhs[j] / denom } else { (rhs[j] - sub(j) * d[k - 1]) / denom };
        }
        let mut x = vec![ZERO; n];
        for k in (0..m).rev() {
            x[k + 1] = if k + 1 < m { d[k] - c[k] * x[k + 2] } else { d[k] };
        }
        let residual = self.relative_residual(op, half, &x, rhs);
        if !(residual <= self.opts.solve_tol) {
            return Err(LabError::SolverDiverged { residual, iterations: 1 });
        }
        Ok(x)
    }

    /// Jacobi-preconditioned BiCGSTAB, warm-started from the previous state.
    fn solve_bicgstab(
        &self,
        op: &Operator,
        half: Complex64,
        rhs: &[Complex64],
        guess: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        let len = rhs.len();
        let inv_diag: Vec<Complex64> = (0..len)
            .map(|i| {
                if is_interior(&self.grid, i) {
                    1.0 / (Complex64::new(1.0, 0.0) - half * op.diag[i])
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        let precond = |v: &[Complex64]| -> Vec<Complex64> { v.iter().zip(&inv_diag).map(|(a, b)| a * b).collect() };
        let bnorm = norm(rhs);
        let mut x: Vec<Complex64> =
            guess.iter().enumerate().map(|(i, g)| if is_interior(&self.grid, i) { *g } else { ZERO }).collect();
        if bnorm == 0.0 {
            return Ok(vec![ZERO; len]);
        }
        let mut tmp = vec![ZERO; len];
        self.system(op, half, &x, &mut tmp);
        let mut r: Vec<Complex64> = rhs.iter().zip(&tmp).map(|(b, a)| b - a).collect();
        let r_hat = r.clone();
        let mut rho = Complex64::new(1.0, 0.0);
        let mut alpha = Complex64::new(1.0, 0.0);
        let mut omega = Complex64::new(1.0, 0.0);
        let mut v = vec![ZERO; len];
        let mut p = vec![ZERO; len];
        let mut residual = norm(&r) / bnorm;
        for it in 0..self.opts.max_iterations {
            if residual <= self.opts.solve_tol {
                return Ok(x);
            }
            let rho_new = dot(&r_hat, &r);
            if rho_new.norm() == 0.0 || omega.norm() == 0.0 {
                return Err(LabError::SolverDiverged { residual, iterations: it });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for k in 0..len {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
            let y = precond(&p);
            self.system(op, half, &y, &mut v);
            alpha = rho / dot(&r_hat, &v);
            let s: Vec<Complex64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
            if norm(&s) / bnorm <= self.opts.solve_tol {
                for k in 0..len {
                    x[k] += alpha * y[k];
                }
                return Ok(x);
            }
            let z = precond(&s);
            let mut t = vec![ZERO; len];
            self.system(op, half, &z, &mut t);
            let tt = dot(&t, &t);
            omega = if tt.norm() == 0.0 { ZERO } else { dot(&t, &s) / tt };
            for k in 0..len {
                x[k] += alpha * y[k] + omega * z[k];
                r[k] = s[k] - omega * t[k];
            }
            residual = norm(&r) / bnorm;
        }
        if residual <= self.opts.solve_tol {
            return Ok(x);
        }
        Err(LabError::SolverDiverged { residual, iterations: self.opts.max_iterations })
    }
}

/// Evolve `initial` for `spec.steps` steps; returns the recorded states,
/// starting with `initial` and ending with the final state.
pub fn evolve_cn<F: FieldModel + ?Sized>(
    initial: &WaveState,
    field: &F,
    spec: &GridSpec,
    opts: &CnOptions,
) -> Result<Vec<WaveState>> {
    let grid = spec.spatial()?;
    if initial.grid != grid {
        return Err(invalid("initial state does not live on the requested grid"));
    }
    if opts.record_every == 0 {
        return Err(invalid("record_every must be at least 1"));
    }
    let cn = CrankNicolson::new(grid, field, spec.dt, *opts)?;
    let mut u = initial.clone();
    for (i, z) in u.values.iter_mut().enumerate() {
        if !is_interior(&grid, i) {
            *z = ZERO;
        }
    }
    cn.check_boundary(&u)?;
    let mut out = vec![u.clone()];
    for step in 1..=spec.steps {
        u = cn.step(&u)?;
        if step % opts.record_every == 0 || step == spec.steps {
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// Exact solution of `∂ₜu = i∂ₓ²u` with `u(x,0) = e^{-a₀x²}`:
/// `(1 + 4ia₀t)^{-1/2} exp(-a₀x² / (1 + 4ia₀t))`.
pub fn free_gaussian_oracle(a0: f64, x: f64, t: f64) -> Complex64 {
    let w = Complex64::new(1.0, 4.0 * a0 * t);
    (-a0 * x * x / w).exp() / w.sqrt()
}

/// Tensor product of [`free_gaussian_oracle`] sampled on `grid` at time `t`.
pub fn free_gaussian_state(grid: SpatialGrid, a0: f64, t: f64) -> WaveState {
    let dim = grid.dim();
    WaveState::from_fn(grid, t, |x| {
        let g = free_gaussian_oracle(a0, x[0], t);
        if dim == 2 {
            g * free_gaussian_oracle(a0, x[1], t)
        } else {
            g
        }
    })
}

/// Relative level below which samples are ignored by the tail fit.
pub const SIGNIFICANCE_FLOOR: f64 = 1e-24;

/// Least-squares slope `-κ` of `log|u|²` against `|x|²` over the outer 10% (in
/// radius) of the region where `|u|² ≥ 1e-24 max|u|²`. Returns `κ`.
pub fn fitted_decay_rate(u: &WaveState) -> Option<f64> {
    let peak = u.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let pts: Vec<(f64, f64)> = u
        .values
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() >= SIGNIFICANCE_FLOOR * peak)
        .map(|(i, z)| (u.grid.r2(i), z.norm_sqr().ln()))
        .collect();
    let r_max = pts.iter().map(|p| p.0).fold(0.0, f64::max).sqrt();
    let cut = (0.9 * r_max).powi(2);
    let tail: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.0 >= cut).collect();
    let fit = if tail.len() >= 3 { &tail } else { &pts };
    let n = fit.len() as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}

/// `∫ e^{2a|x|²}|u|²`, refusing weights that outgrow the observed Gaussian decay.
pub fn weighted_h(u: &WaveState, a: f64) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(invalid(format!("weight coefficient must be nonnegative, got {a}")));
    }
    if a > 0.0 {
        admissible(u, a)?;
    }
    Ok(u.weighted_norm2_raw(a))
}

fn admissible(u: &WaveState, a: f64) -> Result<()> {
    let decay = fitted_decay_rate(u).unwrap_or(f64::NAN);
    if !(2.0 * a < decay * (1.0 - 1e-3)) {
        return Err(LabError::WeightExceedsDecay { t: u.time, two_a: 2.0 * a, decay_rate: decay });
    }
    Ok(())
}

/// What [`trace_h`] does with an inadmissible weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Admissibility {
    /// Fail with `WeightExceedsDecay`.
    #[default]
    Strict,
    /// Record the raw grid value and flag the sample.
    Flag,
}

/// `H(tᵢ)` and `‖u(tᵢ)‖²` along a family of states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    pub norm2: Vec<f64>,
    pub admissible: Vec<bool>,
}

pub fn trace_h<W: Fn(f64) -> f64 + Sync>(
    family: &[WaveState],
    weight: W,
    policy: Admissibility,
) -> Result<EvolutionTrace> {
    let rows: Vec<Result<(f64, f64, f64, bool)>> = family
        .par_iter()
        .map(|u| {
            let a = weight(u.time);
            if !(a >= 0.0 && a.is_finite()) {
                return Err(invalid(format!("weight must be nonnegative, got {a} at t = {}", u.time)));
            }
            let ok = a == 0.0 || admissible(u, a).is_ok();
            if !ok && policy == Admissibility::Strict {
                admissible(u, a)?;
            }
            Ok((u.time, u.weighted_norm2_raw(a), u.norm2(), ok))
        })
        .collect();
    let mut trace = EvolutionTrace::default();
    for row in rows {
        let (t, h, n2, ok) = row?;
        trace.times.push(t);
        trace.h.push(h);
        trace.norm2.push(n2);
        trace.admissible.push(ok);
    }
    Ok(trace)
}

/// `min_i [log H_{i-1} - 2 log H_i + log H_{i+1}]`; `+∞` for fewer than three samples.
pub fn log_convexity_scan(h: &[f64]) -> f64 {
    h.windows(3).map(|w| w[0].ln() - 2.0 * w[1].ln() + w[2].ln()).fold(f64::INFINITY, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.min(v)
        }
    })
}
