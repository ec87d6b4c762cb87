//! Uniform one-dimensional node grids and fourth-order finite differences.

use crate::error::{invalid, Result};
use crate::quadrature::cumulative_uniform;

/// `n` equally spaced nodes on `[lo, hi]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(invalid(format!("grid interval [{lo}, {hi}] is empty")));
        }
        if n < 6 {
            return Err(invalid(format!("grid needs at least 6 nodes, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Odd node count on `[-1, 1]` with a node at `t = 0`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(invalid(format!("symmetric grid needs an odd node count, got {n}")));
        }
        Self::new(-1.0, 1.0, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// Node `i`; mirrored nodes of a symmetric grid are exact negatives.
    pub fn node(&self, i: usize) -> f64 {
        let h = self.spacing();
        let mid = 0.5 * (self.lo + self.hi);
        let c = (self.n - 1) as f64 / 2.0;
        mid + (i as f64 - c) * h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the midpoint (exact for odd counts).
    pub fn center(&self) -> usize {
        self.n / 2
    }

    pub fn sample<F: FnMut(f64) -> f64>(&self, mut f: F) -> GridFunction {
        GridFunction { grid: *self, values: (0..self.n).map(|i| f(self.node(i))).collect() }
    }
}

/// Values on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("{} samples for a grid of {} nodes", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn derivative(&self) -> Vec<f64> {
        first_derivative(&self.values, self.grid.spacing())
    }

    pub fn second_derivative(&self) -> Vec<f64> {
        second_derivative(&self.values, self.grid.spacing())
    }

    /// Running integral from the left end.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_uniform(&self.values, self.grid.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Fourth-order first derivative: centered in the interior, one-sided
/// five-point closures on the two nodes nearest each end.
pub fn first_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "fourth-order stencil needs five samples");
    let c = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    let left = |g: &dyn Fn(usize) -> f64| {
        (
            c * (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)),
            c * (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)),
        )
    };
    let (d0, d1) = left(&|i| f[i]);
    let (e0, e1) = left(&|i| f[n - 1 - i]);
    d[0] = d0;
    d[1] = d1;
    d[n - 1] = -e0;
    d[n - 2] = -e1;
    for i in 2..n - 2 {
        d[i] = c * ((f[i - 2] - f[i + 2]) + 8.0 * (f[i + 1] - f[i - 1]));
    }
    d
}

/// Fourth-order second derivative with six-point one-sided closures.
pub fn second_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6, "fourth-order closure needs six samples");
    let c = 1.0 / (12.0 * h * h);
    let mut d = vec![0.0; n];
    let left = |g: &dyn Fn(usize) -> f64| {
        (
            c * (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5)),
            c * (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5)),
        )
    };
    let (d0, d1) = left(&|i| f[i]);
    let (e0, e1) = left(&|i| f[n - 1 - i]);
    d[0] = d0;
    d[1] = d1;
    d[n - 1] = e0;
    d[n - 2] = e1;
    for i in 2..n - 2 {
        d[i] = c * (-(f[i - 2] + f[i + 2]) + 16.0 * (f[i - 1] + f[i + 1]) - 30.0 * f[i]);
    }
    d
}
