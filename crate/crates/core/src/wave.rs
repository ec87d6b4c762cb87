//! Complex fields sampled on uniform Cartesian grids in one or two dimensions.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// `[-L, L]^dim` with `n` nodes per axis (endpoints included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    half_extent: f64,
    n: usize,
}

impl SpatialGrid {
    pub fn new(dim: usize, half_extent: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("spatial dimension must be 1 or 2, got {dim}")));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(invalid(format!("half extent must be positive, got {half_extent}")));
        }
        if n < 8 {
            return Err(invalid(format!("need at least 8 points per axis, got {n}")));
        }
        Ok(Self { dim, half_extent, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.n - 1) as f64
    }

    /// Coordinate of node `i` along an axis; mirrored nodes are exact negatives.
    pub fn coord(&self, i: usize) -> f64 {
        let c = (self.n - 1) as f64 / 2.0;
        (i as f64 - c) * self.spacing()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Per-axis indices of flat index `idx` (x fastest).
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx % self.n, idx / self.n]
        }
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        if self.dim == 1 {
            [self.coord(i), 0.0]
        } else {
            [self.coord(i), self.coord(j)]
        }
    }

    pub fn r2(&self, idx: usize) -> f64 {
        let p = self.point(idx);
        p[0] * p[0] + p[1] * p[1]
    }

    /// Product trapezoid weight of node `idx` (cell volume included).
    pub fn trapezoid_weight(&self, idx: usize) -> f64 {
        let axis = |i: usize| if i == 0 || i == self.n - 1 { 0.5 } else { 1.0 };
        let [i, j] = self.unflatten(idx);
        let w = if self.dim == 1 { axis(i) } else { axis(i) * axis(j) };
        w * self.cell_volume()
    }

    /// True when node `idx` lies within `layer` nodes of the grid edge.
    pub fn in_boundary_layer(&self, idx: usize, layer: usize) -> bool {
        let near = |i: usize| i < layer || i >= self.n - layer;
        let [i, j] = self.unflatten(idx);
        near(i) || (self.dim == 2 && near(j))
    }
}

/// A complex field on a [`SpatialGrid`] at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub grid: SpatialGrid,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl WaveState {
    pub fn new(grid: SpatialGrid, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("{} values for {} grid nodes", values.len(), grid.len())));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("wave values must be finite"));
        }
        Ok(Self { grid, time, values })
    }

    pub fn from_fn<F: FnMut([f64; 2]) -> Complex64>(grid: SpatialGrid, time: f64, mut f: F) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, time, values }
    }

    pub fn zeros(grid: SpatialGrid, time: f64) -> Self {
        Self { grid, time, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// `‖u‖²` by the product trapezoid rule.
    pub fn norm2(&self) -> f64 {
        self.weighted_norm2_raw(0.0)
    }

    /// `∫ e^{2a|x|²} |u|² dx` by the trapezoid rule, without any admissibility check.
    pub fn weighted_norm2_raw(&self, a: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let w = self.grid.trapezoid_weight(i);
                if a == 0.0 {
                    w * z.norm_sqr()
                } else {
                    w * (2.0 * a * self.grid.r2(i) + z.norm_sqr().ln()).exp()
                }
            })
            .sum()
    }

    /// Squared norm carried by nodes with some coordinate beyond `half` in modulus.
    pub fn mass_outside_box(&self, half: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let p = self.grid.point(*i);
                p[0].abs() > half || (self.grid.dim() == 2 && p[1].abs() > half)
            })
            .map(|(i, z)| self.grid.trapezoid_weight(i) * z.norm_sqr())
            .sum()
    }

    /// Cubic (four-point Lagrange) interpolation; the field is zero off the grid.
    pub fn interpolate(&self, x: [f64; 2]) -> Complex64 {
        let g = &self.grid;
        let stencil = |coord: f64| -> Option<(isize, [f64; 4])> {
            let l = g.half_extent();
            if !(coord.abs() <= l) {
                return None;
            }
            let mut s = (coord + l) / g.spacing();
            // Snap round-off so that grid nodes reproduce stored values exactly.
            if (s - s.round()).abs() < 1e-10 {
                s = s.round();
            }
            let j = s.floor();
            let f = s - j;
            let w = [
                -f * (f - 1.0) * (f - 2.0) / 6.0,
                (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                -(f + 1.0) * f * (f - 2.0) / 2.0,
                (f + 1.0) * f * (f - 1.0) / 6.0,
            ];
            Some((j as isize - 1, w))
        };
        let n = g.points_per_axis() as isize;
        let at = |i: isize, j: isize| -> Complex64 {
            if i < 0 || i >= n || j < 0 || j >= n {
                Complex64::new(0.0, 0.0)
            } else {
                self.values[(j * n + i) as usize]
            }
        };
        let Some((i0, wx)) = stencil(x[0]) else {
            return Complex64::new(0.0, 0.0);
        };
        if g.dim() == 1 {
            return (0..4).filter(|&a| wx[a] != 0.0).map(|a| at(i0 + a as isize, 0) * wx[a]).sum();
        }
        let Some((j0, wy)) = stencil(x[1]) else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..4 {
            if wy[b] == 0.0 {
                continue;
            }
            for a in 0..4 {
                if wx[a] != 0.0 {
                    acc += at(i0 + a as isize, j0 + b as isize) * (wx[a] * wy[b]);
                }
            }
        }
        acc
    }

    /// Max-norm distance to another state on the same grid.
    pub fn max_distance(&self, other: &WaveState) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `‖u − v‖²` by the trapezoid rule.
    pub fn distance2(&self, other: &WaveState) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| self.grid.trapezoid_weight(i) * (a - b).norm_sqr())
            .sum()
    }
}
