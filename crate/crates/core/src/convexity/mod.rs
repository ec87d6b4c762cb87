//! Weight-profile iteration and the log-convexity toolkit.
//!
//! Profiles live on a symmetric uniform grid over `[-1, 1]`. Starting from a
//! constant profile `a ≡ μ`, each step solves for the shift curve `b`, checks
//! the gate `1 - a(0) b(0)`, and updates `a ← a / (1 - a b)`. For `μ ≤ 1/8` the
//! iterates converge to `R / (4 (1 + R² t²))`.

mod bound;
mod hardy;
mod iteration;
mod profile;

pub use bound::{
    box_samples, convexity_bound_check, env_constants, solve_t, solve_t_fn, theta, BoundInputs, EnvConstants,
};
pub use hardy::{decay_profile, hardy_verdict, limit_profile, smallest_root_r, HardyProfile, HardyVerdict};
pub use iteration::{run_iteration, IterationOptions, IterationOutcome, IterationState, Verdict};
pub use profile::{f_of, gate, iterate_step, solve_b, ShiftCurve, WeightProfile, EVEN_TOLERANCE};
