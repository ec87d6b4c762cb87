use crate::error::{invalid, LabError, Result};
use crate::grid::{first_derivative, second_derivative, UniformGrid};
use crate::quadrature::panel_integrals;

/// Largest tolerated `|a(t) - a(-t)|` for a profile to count as even.
pub const EVEN_TOLERANCE: f64 = 1e-10;

/// A positive, even weight profile `a(t)` sampled on a symmetric grid over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    grid: UniformGrid,
    values: Vec<f64>,
}

fn check_symmetric(grid: &UniformGrid) -> Result<()> {
    if grid.lo() != -1.0 || grid.hi() != 1.0 || grid.len() % 2 == 0 {
        return Err(invalid("profiles need an odd node count on [-1, 1]"));
    }
    if grid.len() < 7 {
        return Err(invalid(format!("profile grid needs at least 7 nodes, got {}", grid.len())));
    }
    Ok(())
}

impl WeightProfile {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        check_symmetric(&grid)?;
        if values.len() != grid.len() {
            return Err(invalid(format!("{} samples for {} nodes", values.len(), grid.len())));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::NonPositiveProfile { t: grid.node(i), value: v });
            }
        }
        let n = values.len();
        for i in 0..n / 2 {
            let dev = (values[i] - values[n - 1 - i]).abs();
            if dev > EVEN_TOLERANCE * values[i].abs().max(1.0) {
                return Err(LabError::NotEven { t: grid.node(n - 1 - i), deviation: dev });
            }
        }
        Ok(Self { grid, values })
    }

    /// `a ≡ μ` on `m` nodes: the first iterate.
    pub fn constant(mu: f64, m: usize) -> Result<Self> {
        let grid = UniformGrid::symmetric(m)?;
        Self::new(grid, vec![mu; m])
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(m: usize, f: F) -> Result<Self> {
        let grid = UniformGrid::symmetric(m)?;
        let values = grid.sample(f).values;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn center_value(&self) -> f64 {
        self.values[self.grid.center()]
    }

    pub fn endpoint_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn derivative(&self) -> Vec<f64> {
        first_derivative(&self.values, self.grid.spacing())
    }

    pub fn second_derivative(&self) -> Vec<f64> {
        second_derivative(&self.values, self.grid.spacing())
    }

    /// `γ = 1/a`.
    pub fn gamma(&self) -> Vec<f64> {
        self.values.iter().map(|a| 1.0 / a).collect()
    }

    /// Largest increase `a(t_{i+1}) - a(t_i)` over `[0, 1]`; `≤ 0` means nonincreasing.
    pub fn max_rise_on_right(&self) -> f64 {
        self.values[self.grid.center()..].windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Shift curve `b(t)`: even, vanishing at `t = ±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCurve {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl ShiftCurve {
    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn center_value(&self) -> f64 {
        self.values[self.grid.center()]
    }
}

/// `F(a) = (ä + 32a³ - 3ȧ²/(2a)) / a`, with order-4 differences.
pub fn f_of(a: &WeightProfile) -> Vec<f64> {
    let d1 = a.derivative();
    let d2 = a.second_derivative();
    a.values
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(&v, (&da, &dda))| (dda + 32.0 * v * v * v - 1.5 * da * da / v) / v)
        .collect()
}

/// `b(t) = ∫_t^1 ∫_0^s F(a)/a`, requiring `F(a) > 0`.
pub fn solve_b(a: &WeightProfile) -> Result<ShiftCurve> {
    let f = f_of(a);
    if let Some((i, &v)) = f.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(LabError::NonPositiveF { t: a.grid.node(i), value: v });
    }
    Ok(shift_curve(a, &f))
}

/// The double integral on the right half-grid, mirrored so `b` is exactly even
/// and exactly zero at the endpoints. No sign requirement on `f`.
pub(crate) fn shift_curve(a: &WeightProfile, f: &[f64]) -> ShiftCurve {
    let c = a.grid.center();
    let h = a.grid.spacing();
    let g: Vec<f64> = (c..a.len()).map(|i| f[i] / a.values[i]).collect();
    let mut inner = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    inner.push(0.0);
    for p in panel_integrals(&g, h) {
        acc += p;
        inner.push(acc);
    }
    let outer = panel_integrals(&inner, h);
    let mut half = vec![0.0; g.len()];
    for i in (0..g.len() - 1).rev() {
        half[i] = half[i + 1] + outer[i];
    }
    let mut values = vec![0.0; a.len()];
    for (i, &v) in half.iter().enumerate() {
        values[c + i] = v;
        values[c - i] = v;
    }
    ShiftCurve { grid: a.grid, values }
}

/// `1 - a(0) b(0)`.
pub fn gate(a: &WeightProfile, b: &ShiftCurve) -> f64 {
    1.0 - a.center_value() * b.center_value()
}

/// `a / (1 - a b)`; fails if the denominator is nonpositive anywhere.
pub fn iterate_step(a: &WeightProfile, b: &ShiftCurve) -> Result<WeightProfile> {
    if a.grid != b.grid {
        return Err(invalid("profile and shift curve live on different grids"));
    }
    let mut values = Vec::with_capacity(a.len());
    for (i, (&av, &bv)) in a.values.iter().zip(&b.values).enumerate() {
        let g = 1.0 - av * bv;
        if !(g > 0.0) {
            return Err(LabError::GateClosed { t: a.grid.node(i), gate: g });
        }
        values.push(av / g);
    }
    Ok(WeightProfile { grid: a.grid, values })
}
