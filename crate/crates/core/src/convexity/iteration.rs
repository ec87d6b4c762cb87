use super::profile::{f_of, iterate_step, shift_curve, ShiftCurve, WeightProfile};
use crate::error::{invalid, LabError, Result};

/// Knobs for [`run_iteration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Odd node count on `[-1, 1]`.
    pub nodes: usize,
    /// Sup-norm step size below which the iteration counts as converged.
    pub tol: f64,
    pub k_max: usize,
    /// Divergence threshold on `a(0)`; `None` means `1e6 μ`.
    pub a_cap: Option<f64>,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { nodes: 513, tol: 1e-10, k_max: 500, a_cap: None }
    }
}

/// One iterate together with its shift curve and gate.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub k: usize,
    pub profile: WeightProfile,
    pub curve: ShiftCurve,
    pub gate: f64,
}

impl IterationState {
    pub fn new(k: usize, profile: WeightProfile) -> Self {
        // Near the limit F(a) → 0 and its discrete values may dip just below
        // zero; the curve is still well defined, so no sign check here.
        let f = f_of(&profile);
        let curve = shift_curve(&profile, &f);
        let gate = super::profile::gate(&profile, &curve);
        Self { k, profile, curve, gate }
    }

    /// `a_1 ≡ μ`.
    pub fn first(mu: f64, nodes: usize) -> Result<Self> {
        Ok(Self::new(1, WeightProfile::constant(mu, nodes)?))
    }

    pub fn advance(&self) -> Result<Self> {
        Ok(Self::new(self.k + 1, iterate_step(&self.profile, &self.curve)?))
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    /// `a_k` moved less than the tolerance in the last step.
    Converged { k: usize, profile: WeightProfile },
    /// `1 - a_k b_k ≤ 0` somewhere (at `t = 0` first of all).
    GateClosed { k: usize, gate: f64 },
    /// `a_k(0)` exceeded the cap.
    Unbounded { k: usize, center: f64 },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "Converged",
            Verdict::GateClosed { .. } => "GateClosed",
            Verdict::Unbounded { .. } => "Unbounded",
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Verdict::Converged { k, .. } | Verdict::GateClosed { k, .. } | Verdict::Unbounded { k, .. } => *k,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub verdict: Verdict,
    /// `a_1, a_2, …` in order.
    pub profiles: Vec<WeightProfile>,
    /// Gate value of each iterate for which one was computed.
    pub gates: Vec<f64>,
    pub last_change: f64,
}

/// Iterate from `a_1 ≡ μ` until a verdict is reached.
pub fn run_iteration(mu: f64, opts: &IterationOptions) -> Result<IterationOutcome> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid(format!("mu must be positive, got {mu}")));
    }
    if !(opts.tol > 0.0) || opts.k_max == 0 {
        return Err(invalid("tolerance must be positive and k_max at least 1"));
    }
    let cap = opts.a_cap.unwrap_or(1e6 * mu);
    let mut state = IterationState::first(mu, opts.nodes)?;
    let mut profiles = vec![state.profile.clone()];
    let mut gates = Vec::new();
    let mut last_change = f64::INFINITY;
    let finish = |verdict, profiles, gates, last_change| Ok(IterationOutcome { verdict, profiles, gates, last_change });
    loop {
        gates.push(state.gate);
        if state.gate <= 0.0 {
            let v = Verdict::GateClosed { k: state.k, gate: state.gate };
            return finish(v, profiles, gates, last_change);
        }
        let next = match state.advance() {
            Ok(next) => next,
            Err(LabError::GateClosed { gate, .. }) => {
                let v = Verdict::GateClosed { k: state.k, gate };
                return finish(v, profiles, gates, last_change);
            }
            Err(e) => return Err(e),
        };
        last_change = next.profile.sup_distance(state.profile.values());
        profiles.push(next.profile.clone());
        let center = next.profile.center_value();
        if !(center <= cap) {
            let v = Verdict::Unbounded { k: next.k, center };
            return finish(v, profiles, gates, last_change);
        }
        if last_change < opts.tol {
            // A closed gate on the final iterate outranks convergence.
            gates.push(next.gate);
            let v = if next.gate <= 0.0 {
                Verdict::GateClosed { k: next.k, gate: next.gate }
            } else {
                Verdict::Converged { k: next.k, profile: next.profile }
            };
            return finish(v, profiles, gates, last_change);
        }
        if next.k >= opts.k_max {
            return Err(LabError::IterationBudgetExceeded { k_max: opts.k_max, last_change });
        }
        state = next;
    }
}
