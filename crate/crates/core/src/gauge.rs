//! Reduction of a vector potential to the radial gauge `x·Ã(x) = 0`.
//!
//! With `φ(x) = x·∫₀¹ A(sx) ds`, the potential `Ã = A - ∇φ` satisfies
//! `Ã^k(x) = ∫₀¹ s (xᵗB(sx))^k ds`, where `B_jk = ∂_j A^k - ∂_k A^j`.
//! Both routes are implemented and cross-checked.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, LabError, Result};
use crate::example::{eval_curl_a, eval_potential_a, Point3};
use crate::quadrature::GaussLegendre;

/// A static vector potential `A: Rⁿ → Rⁿ`.
pub trait PotentialField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Vec<f64>;

    /// Analytic Jacobian `J[j][k] = ∂_j A^k`, if known.
    fn jacobian(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let _ = x;
        None
    }

    /// Closed-form field matrix, if known; otherwise built from the Jacobian.
    fn field_matrix(&self, x: &[f64]) -> Option<FieldMatrix> {
        let _ = x;
        None
    }
}

/// Central-difference step for the Jacobian fallback.
pub fn jacobian_step(x: &[f64]) -> f64 {
    1e-5 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Central-difference Jacobian `J[j][k] ≈ ∂_j A^k`.
pub fn fd_jacobian<F: PotentialField + ?Sized>(field: &F, x: &[f64]) -> Vec<Vec<f64>> {
    let h = jacobian_step(x);
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|j| {
            xp[j] = x[j] + h;
            let plus = field.eval(&xp);
            xp[j] = x[j] - h;
            let minus = field.eval(&xp);
            xp[j] = x[j];
            plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
        })
        .collect()
}

pub fn jacobian<F: PotentialField + ?Sized>(field: &F, x: &[f64]) -> Vec<Vec<f64>> {
    field.jacobian(x).unwrap_or_else(|| fd_jacobian(field, x))
}

/// The antisymmetric matrix `B_jk = ∂_j A^k - ∂_k A^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix {
    pub b: Vec<Vec<f64>>,
}

impl FieldMatrix {
    pub fn from_jacobian(j: &[Vec<f64>]) -> Self {
        let n = j.len();
        let b = (0..n).map(|r| (0..n).map(|c| j[r][c] - j[c][r]).collect()).collect();
        Self { b }
    }

    /// From `curl A` in three dimensions: `B_yz = curl_x`, `B_zx = curl_y`, `B_xy = curl_z`.
    pub fn from_curl(c: [f64; 3]) -> Self {
        let b = vec![vec![0.0, c[2], -c[1]], vec![-c[2], 0.0, c[0]], vec![c[1], -c[0], 0.0]];
        Self { b }
    }

    /// `(xᵗB)_k = Σ_j x_j B_jk`.
    pub fn contract(&self, x: &[f64]) -> Vec<f64> {
        let n = self.b.len();
        (0..n).map(|k| (0..n).map(|j| x[j] * self.b[j][k]).sum()).collect()
    }

    /// `max |B + Bᵗ|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.b.len();
        let mut m: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                m = m.max((self.b[r][c] + self.b[c][r]).abs());
            }
        }
        m
    }

    pub fn max_distance(&self, other: &FieldMatrix) -> f64 {
        self.b.iter().flatten().zip(other.b.iter().flatten()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn field_matrix<F: PotentialField + ?Sized>(field: &F, x: &[f64]) -> FieldMatrix {
    field.field_matrix(x).unwrap_or_else(|| FieldMatrix::from_jacobian(&jacobian(field, x)))
}

/// `Ψ(x) = xᵗB(x)`.
pub fn x_t_b<F: PotentialField + ?Sized>(field: &F, x: &[f64]) -> Vec<f64> {
    field_matrix(field, x).contract(x)
}

/// Composite Gauss–Legendre rule on `[0, 1]` with 16-point panels.
#[derive(Debug, Clone)]
pub struct SegmentRule {
    nodes: Vec<(f64, f64)>,
}

impl SegmentRule {
    /// At least `nodes` points, rounded up to a multiple of 16.
    pub fn new(nodes: usize) -> Self {
        let base = GaussLegendre::new(16);
        let panels = nodes.div_ceil(16).max(1);
        let width = 1.0 / panels as f64;
        let nodes = (0..panels)
            .flat_map(|p| {
                let lo = p as f64 * width;
                base.on_interval(lo, lo + width).collect::<Vec<_>>()
            })
            .collect();
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn check_point<F: PotentialField + ?Sized>(field: &F, x: &[f64]) -> Result<()> {
    if x.len() != field.dim() {
        return Err(invalid(format!("point has {} coordinates, field has dimension {}", x.len(), field.dim())));
    }
    Ok(())
}

fn scaled(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|v| s * v).collect()
}

/// `φ(x) = x·∫₀¹ A(sx) ds`.
pub fn compute_phi<F: PotentialField + ?Sized>(field: &F, x: &[f64], nodes: usize) -> Result<f64> {
    check_point(field, x)?;
    let rule = SegmentRule::new(nodes);
    let mut acc = 0.0;
    for &(s, w) in &rule.nodes {
        let a = field.eval(&scaled(x, s));
        let v: f64 = x.iter().zip(&a).map(|(xi, ai)| xi * ai).sum();
        if !v.is_finite() {
            return Err(LabError::NonFiniteSample { s });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// `∫₀¹ s xᵗB(sx) ds` with a fixed rule.
pub fn cronstrom_with_rule<F: PotentialField + ?Sized>(field: &F, x: &[f64], rule: &SegmentRule) -> Result<Vec<f64>> {
    check_point(field, x)?;
    let mut acc = vec![0.0; x.len()];
    for &(s, w) in &rule.nodes {
        let psi = field_matrix(field, &scaled(x, s)).contract(x);
        for (a, p) in acc.iter_mut().zip(&psi) {
            if !p.is_finite() {
                return Err(LabError::NonFiniteSample { s });
            }
            *a += w * s * p;
        }
    }
    Ok(acc)
}

/// Quadrature control for [`cronstrom_transform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeQuadrature {
    pub initial_nodes: usize,
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for GaugeQuadrature {
    fn default() -> Self {
        Self { initial_nodes: 64, tol: 1e-10, max_nodes: 4096 }
    }
}

/// `Ã(x)` by the integral identity, doubling the node count until two
/// successive values agree to `tol`.
pub fn cronstrom_transform<F: PotentialField + ?Sized>(
    field: &F,
    x: &[f64],
    quad: GaugeQuadrature,
) -> Result<Vec<f64>> {
    let mut nodes = quad.initial_nodes.max(16);
    let mut prev = cronstrom_with_rule(field, x, &SegmentRule::new(nodes))?;
    loop {
        if nodes * 2 > quad.max_nodes {
            let est = prev.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            return Err(LabError::QuadratureNotConverged { estimate: est, error: f64::NAN });
        }
        nodes *= 2;
        let next = cronstrom_with_rule(field, x, &SegmentRule::new(nodes))?;
        let diff = next.iter().zip(&prev).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        if diff <= quad.tol {
            return Ok(next);
        }
        if nodes * 2 > quad.max_nodes {
            let est = next.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            return Err(LabError::QuadratureNotConverged { estimate: est, error: diff });
        }
        prev = next;
    }
}

/// `Ã = A - ∇φ` with `∇φ` by central differences of [`compute_phi`].
pub fn cronstrom_via_gradient<F: PotentialField + ?Sized>(field: &F, x: &[f64], nodes: usize) -> Result<Vec<f64>> {
    check_point(field, x)?;
    let h = jacobian_step(x) * 10.0;
    let a = field.eval(x);
    let mut xp = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        xp[k] = x[k] + h;
        let p = compute_phi(field, &xp, nodes)?;
        xp[k] = x[k] - h;
        let m = compute_phi(field, &xp, nodes)?;
        xp[k] = x[k];
        out.push(a[k] - (p - m) / (2.0 * h));
    }
    Ok(out)
}

/// The gauge-reduced field, evaluated with a fixed quadrature rule so that it
/// is a smooth function of `x` (finite differences of it stay clean).
pub struct CronstromField<'a, F: PotentialField + ?Sized> {
    inner: &'a F,
    rule: SegmentRule,
}

impl<'a, F: PotentialField + ?Sized> CronstromField<'a, F> {
    pub fn new(inner: &'a F, nodes: usize) -> Self {
        Self { inner, rule: SegmentRule::new(nodes) }
    }
}

impl<F: PotentialField + ?Sized> PotentialField for CronstromField<'_, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        cronstrom_with_rule(self.inner, x, &self.rule).unwrap_or_else(|_| vec![f64::NAN; x.len()])
    }
}

/// Largest deviations found by [`verify_gauge`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeReport {
    /// `max |x·Ã(x)|`.
    pub max_radial: f64,
    /// `max |B̃(x) - B(x)|` entrywise.
    pub max_field_deviation: f64,
    pub samples: usize,
}

pub fn verify_gauge<F, G>(original: &F, transformed: &G, samples: &[Vec<f64>]) -> GaugeReport
where
    F: PotentialField + ?Sized,
    G: PotentialField + ?Sized,
{
    use rayon::prelude::*;
    let (radial, dev) = samples
        .par_iter()
        .map(|x| {
            let at = transformed.eval(x);
            let radial: f64 = x.iter().zip(&at).map(|(a, b)| a * b).sum::<f64>().abs();
            let dev = field_matrix(transformed, x).max_distance(&field_matrix(original, x));
            (radial, dev)
        })
        .reduce(|| (0.0, 0.0), |a, b| (nan_max(a.0, b.0), nan_max(a.1, b.1)));
    GaugeReport { max_radial: radial, max_field_deviation: dev, samples: samples.len() }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `A = (0, B₀ x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauField {
    pub b0: f64,
}

impl PotentialField for LandauField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0, self.b0 * x[0]]
    }

    fn jacobian(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        Some(vec![vec![0.0, self.b0], vec![0.0, 0.0]])
    }
}

/// `A = (B₀/2)(-y, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricGaugeField {
    pub b0: f64,
}

impl PotentialField for SymmetricGaugeField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![-0.5 * self.b0 * x[1], 0.5 * self.b0 * x[0]]
    }

    fn jacobian(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let h = 0.5 * self.b0;
        Some(vec![vec![0.0, h], vec![-h, 0.0]])
    }
}

/// `A = ∇χ` with `χ = x³/3 + x y² + y`, a pure gauge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradientField;

impl PotentialField for GradientField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] * x[0] + x[1] * x[1], 2.0 * x[0] * x[1] + 1.0]
    }

    fn jacobian(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        Some(vec![vec![2.0 * x[0], 2.0 * x[1]], vec![2.0 * x[1], 2.0 * x[0]]])
    }
}

/// The explicit three-dimensional example potential frozen at time `t`.
/// Evaluates to NaN on the `z` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleField {
    pub t: f64,
    pub k: f64,
}

impl PotentialField for ExampleField {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        match eval_potential_a(&Point3::new(x[0], x[1], x[2]), self.t, self.k) {
            Ok(a) => a.to_vec(),
            Err(_) => vec![f64::NAN; 3],
        }
    }

    fn field_matrix(&self, x: &[f64]) -> Option<FieldMatrix> {
        let c = eval_curl_a(&Point3::new(x[0], x[1], x[2]), self.t, self.k).unwrap_or([f64::NAN; 3]);
        Some(FieldMatrix::from_curl(c))
    }
}

/// `A^k(x) = c_k + Σ_j L_kj x_j + Σ_{j≤l} Q_kjl x_j x_l` with random coefficients in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticField {
    dim: usize,
    constant: Vec<f64>,
    linear: Vec<Vec<f64>>,
    quadratic: Vec<Vec<Vec<f64>>>,
}

impl QuadraticField {
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("field dimension must be at least 2"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.gen_range(-1.0..=1.0);
        let constant = (0..dim).map(|_| draw()).collect();
        let linear = (0..dim).map(|_| (0..dim).map(|_| draw()).collect()).collect();
        let quadratic = (0..dim)
            .map(|_| (0..dim).map(|j| (0..dim).map(|l| if l >= j { draw() } else { 0.0 }).collect()).collect())
            .collect();
        Ok(Self { dim, constant, linear, quadratic })
    }
}

impl PotentialField for QuadraticField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                let mut v = self.constant[k];
                for j in 0..self.dim {
                    v += self.linear[k][j] * x[j];
                    for l in j..self.dim {
                        v += self.quadratic[k][j][l] * x[j] * x[l];
                    }
                }
                v
            })
            .collect()
    }

    fn jacobian(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        let mut jac = vec![vec![0.0; n]; n];
        for (j, row) in jac.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                let mut v = self.linear[k][j];
                for l in 0..n {
                    let (lo, hi) = if l < j { (l, j) } else { (j, l) };
                    let q = self.quadratic[k][lo][hi];
                    v += if l == j { 2.0 * q * x[j] } else { q * x[l] };
                }
                *entry = v;
            }
        }
        Some(jac)
    }
}

/// Uniformly distributed points in `[-half, half]^dim`.
pub fn random_box_points(dim: usize, half: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-half..=half)).collect()).collect()
}
