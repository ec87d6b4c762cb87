use crate::error::{invalid, Result};
use crate::gauge::{x_t_b, PotentialField};
use crate::grid::{GridFunction, UniformGrid};
use crate::quadrature::cumulative_uniform;

fn reciprocal(gamma: &GridFunction) -> Result<Vec<f64>> {
    gamma
        .values
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            if g > 0.0 && g.is_finite() {
                Ok(1.0 / g)
            } else {
                Err(invalid(format!("gamma must be positive, got {g} at t = {}", gamma.grid.node(i))))
            }
        })
        .collect()
}

/// Solve `(γ T')' = -ψ` on `[c, d]` with `T(c) = T(d) = 0`.
///
/// `γ T' = C - ∫_c^t ψ`, so `T = ∫_c^t (C - Ψ)/γ` with `C` fixed by `T(d) = 0`.
pub fn solve_t(gamma: &GridFunction, psi: &GridFunction) -> Result<GridFunction> {
    if gamma.grid != psi.grid {
        return Err(invalid("gamma and psi must share a grid"));
    }
    let h = gamma.grid.spacing();
    let inv = reciprocal(gamma)?;
    let big_psi = cumulative_uniform(&psi.values, h);
    let weighted: Vec<f64> = big_psi.iter().zip(&inv).map(|(p, g)| p * g).collect();
    let i0 = cumulative_uniform(&inv, h);
    let i1 = cumulative_uniform(&weighted, h);
    let n = i0.len();
    let c0 = i1[n - 1] / i0[n - 1];
    let values = i0.iter().zip(&i1).map(|(a, b)| c0 * a - b).collect();
    GridFunction::new(gamma.grid, values)
}

/// [`solve_t`] with `γ` and `ψ` given as functions, sampled on `n` nodes.
pub fn solve_t_fn<G, P>(gamma: G, psi: P, c: f64, d: f64, n: usize) -> Result<GridFunction>
where
    G: FnMut(f64) -> f64,
    P: FnMut(f64) -> f64,
{
    let grid = UniformGrid::new(c, d, n)?;
    solve_t(&grid.sample(gamma), &grid.sample(psi))
}

/// `θ(t) = ∫_t^d 1/γ / ∫_c^d 1/γ` on the grid of `gamma`; exactly 1 at `c` and 0 at `d`.
pub fn theta(gamma: &GridFunction) -> Result<Vec<f64>> {
    let inv = reciprocal(gamma)?;
    let cum = cumulative_uniform(&inv, gamma.grid.spacing());
    let total = cum[cum.len() - 1];
    Ok(cum.iter().map(|c| (total - c) / total).collect())
}

/// Samples for [`convexity_bound_check`], all on one grid over `[c, d]`.
///
/// Empty `t` or `m` slices stand for identically zero functions.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs<'a> {
    pub h: &'a [f64],
    pub t: &'a [f64],
    pub m: &'a [f64],
    pub n: f64,
    pub theta: &'a [f64],
    pub eps: f64,
}

/// Minimum over the grid of
/// `2T + M + 2N + θ log(H(c)+ε) + (1-θ) log(H(d)+ε) - log(H+ε)`.
/// Nonnegative means the interpolation bound holds on the data.
pub fn convexity_bound_check(inp: &BoundInputs<'_>) -> Result<f64> {
    let len = inp.h.len();
    if len < 2 || inp.theta.len() != len {
        return Err(invalid("H and theta must have the same length, at least 2"));
    }
    for (name, s) in [("T", inp.t), ("M", inp.m)] {
        if !s.is_empty() && s.len() != len {
            return Err(invalid(format!("{name} has {} samples, expected {len}", s.len())));
        }
    }
    if !(inp.eps >= 0.0) {
        return Err(invalid("epsilon must be nonnegative"));
    }
    let lc = (inp.h[0] + inp.eps).ln();
    let ld = (inp.h[len - 1] + inp.eps).ln();
    let at = |s: &[f64], i: usize| if s.is_empty() { 0.0 } else { s[i] };
    Ok((0..len)
        .map(|i| {
            let th = inp.theta[i];
            2.0 * at(inp.t, i) + at(inp.m, i) + 2.0 * inp.n + th * lc + (1.0 - th) * ld - (inp.h[i] + inp.eps).ln()
        })
        .fold(f64::INFINITY, f64::min))
}

/// `M_B = 2 sup|xᵗB|²` and `M_V = 2‖V‖ + ‖V‖²/4`, as suprema over a sample set
/// (so lower bounds of the true suprema).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvConstants {
    pub m_b: f64,
    pub m_v: f64,
}

pub fn env_constants<F, V>(field: &F, v: V, samples: &[Vec<f64>]) -> EnvConstants
where
    F: PotentialField + ?Sized,
    V: Fn(&[f64]) -> f64,
{
    let mut psi2: f64 = 0.0;
    let mut vmax: f64 = 0.0;
    for x in samples {
        let psi = x_t_b(field, x);
        psi2 = psi2.max(psi.iter().map(|p| p * p).sum());
        vmax = vmax.max(v(x).abs());
    }
    EnvConstants { m_b: 2.0 * psi2, m_v: 2.0 * vmax + vmax * vmax / 4.0 }
}

/// Tensor grid of `per_axis^dim` points on `[-half, half]^dim`.
pub fn box_samples(dim: usize, half: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let coord = |i: usize| {
        if per_axis == 1 {
            0.0
        } else {
            -half + 2.0 * half * i as f64 / (per_axis - 1) as f64
        }
    };
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let c = coord(idx % per_axis);
                    idx /= per_axis;
                    c
                })
                .collect()
        })
        .collect()
}
