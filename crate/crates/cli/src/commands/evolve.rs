use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use hardylab::convexity::{convexity_bound_check, BoundInputs};
use hardylab::propagator::{
    evolve_cn, free_gaussian_state, log_convexity_scan, trace_h, Admissibility, CnOptions, ConstantPotential,
    EvolutionTrace, FieldModel, FreeField, GridSpec, UniformMagnetic,
};
use hardylab::wave::WaveState;

use super::{pick, positive};
use crate::config::Settings;
use crate::error::{bad, CliResult};
use crate::output::{fmt_f64, Sinks, Table, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// `free-gaussian` (default), `constant-potential` or `uniform-magnetic`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Spatial dimension, 1 or 2. Default 1 (2 for `uniform-magnetic`).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Half width L of the box [-L, L]^dim. Default 16.
    #[arg(long)]
    pub half_extent: Option<f64>,
    /// Points per axis: a power of two or odd and at least 65. Default 1024 (129 in 2D).
    #[arg(long)]
    pub n: Option<usize>,
    /// Time step. Default 2e-3.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Start time. Default -1.
    #[arg(long)]
    pub t0: Option<f64>,
    /// End time; t1 - t0 must be a multiple of dt. Default 1.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Record every n-th step in the trace. Default 10.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Initial Gaussian exp(-a0 |x|²) at t = 0, evaluated at t0. Default 0.25.
    #[arg(long)]
    pub a0: Option<f64>,
    /// Constant weight a ≡ μ in H(t) = ‖exp(μ|x|²) u(t)‖². Default 0.05.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Real potential for `constant-potential`. Default 0.5.
    #[arg(long)]
    pub c: Option<f64>,
    /// Field strength for `uniform-magnetic`. Default 1.
    #[arg(long)]
    pub b0: Option<f64>,
    /// `flag` (default) records inadmissible weights; `strict` aborts.
    #[arg(long)]
    pub admissibility: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[command(flatten)]
    pub evolve: EvolveArgs,
    /// Tolerance on the log-convexity scan and the bound slack. Default 1e-6.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Preset {
    FreeGaussian,
    ConstantPotential,
    UniformMagnetic,
}

const PRESETS: &[(&str, Preset)] = &[
    ("free-gaussian", Preset::FreeGaussian),
    ("constant-potential", Preset::ConstantPotential),
    ("uniform-magnetic", Preset::UniformMagnetic),
];

const POLICIES: &[(&str, Admissibility)] = &[("flag", Admissibility::Flag), ("strict", Admissibility::Strict)];

#[derive(Debug, Serialize)]
struct Summary {
    preset: String,
    dim: usize,
    n: usize,
    half_extent: f64,
    dt: f64,
    steps: usize,
    t0: f64,
    t1: f64,
    a0: f64,
    mu: f64,
    samples: usize,
    /// `min_i [log H_{i-1} - 2 log H_i + log H_{i+1}]`.
    min_second_difference: f64,
    /// `max_i |‖u(t_i)‖² / ‖u(t_0)‖² - 1|`.
    max_norm_drift: f64,
    all_admissible: bool,
    /// L² distance to the closed-form solution, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    max_oracle_error: Option<f64>,
    /// `max_i |H(t_i) / H_exact(t_i) - 1|` for the Gaussian presets.
    #[serde(skip_serializing_if = "Option::is_none")]
    max_h_rel_error_vs_closed_form: Option<f64>,
}

/// `∫ e^{2μ|x|²} |u|²` for the free Gaussian: per axis `√(π / (2a₀/d − 2μ)) / √d`
/// with `d = 1 + 16 a₀² t²`; `None` where the integral diverges.
fn closed_form_h(a0: f64, mu: f64, t: f64, dim: usize) -> Option<f64> {
    let d = 1.0 + 16.0 * a0 * a0 * t * t;
    let rate = 2.0 * a0 / d - 2.0 * mu;
    (rate > 0.0).then(|| ((std::f64::consts::PI / rate).sqrt() / d.sqrt()).powi(dim as i32))
}

#[derive(Debug, Serialize)]
struct EvolveReport {
    schema_version: u32,
    command: &'static str,
    #[serde(flatten)]
    summary: Summary,
}

#[derive(Debug, Serialize)]
struct ConvexityReport {
    schema_version: u32,
    command: &'static str,
    #[serde(flatten)]
    summary: Summary,
    tol: f64,
    /// Minimum of `θ log H(t0) + (1-θ) log H(t1) - log H(t)` with θ linear in t.
    bound_slack: f64,
    pass: bool,
}

struct Run {
    summary: Summary,
    trace: EvolutionTrace,
}

fn evolve(s: &Settings, a: &EvolveArgs) -> CliResult<Run> {
    let preset_name = s.get("preset", a.preset.clone(), "free-gaussian".to_string())?;
    let preset = pick("preset", &preset_name, PRESETS)?;
    let two_d = preset == Preset::UniformMagnetic;
    let dim = s.get("dim", a.dim, if two_d { 2 } else { 1 })?;
    if two_d && dim != 2 {
        return Err(bad("uniform-magnetic needs dim = 2"));
    }
    let half_extent = s.get("half_extent", a.half_extent, 16.0)?;
    let n = s.get("n", a.n, if dim == 2 { 129 } else { 1024 })?;
    let dt = positive("dt", s.get("dt", a.dt, 2e-3)?)?;
    let t0 = s.get("t0", a.t0, -1.0)?;
    let t1 = s.get("t1", a.t1, 1.0)?;
    let record_every = s.get("record_every", a.record_every, 10)?;
    let a0 = positive("a0", s.get("a0", a.a0, 0.25)?)?;
    let mu = s.get("mu", a.mu, 0.05)?;
    let c = s.get("c", a.c, 0.5)?;
    let b0 = s.get("b0", a.b0, 1.0)?;
    let policy =
        pick("admissibility", &s.get("admissibility", a.admissibility.clone(), "flag".to_string())?, POLICIES)?;

    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(bad(format!("mu must be nonnegative, got {mu}")));
    }
    if record_every == 0 {
        return Err(bad("record_every must be at least 1"));
    }
    let span = t1 - t0;
    let steps = (span / dt).round();
    if !(span > 0.0) || (steps * dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(bad(format!("t1 - t0 = {span} must be a positive multiple of dt = {dt}")));
    }
    let spec = GridSpec { dim, half_extent, n, dt, steps: steps as usize };
    let grid = spec.spatial()?;

    let field: Box<dyn FieldModel> = match preset {
        Preset::FreeGaussian => Box::new(FreeField),
        Preset::ConstantPotential => Box::new(ConstantPotential(Complex64::new(c, 0.0))),
        Preset::UniformMagnetic => Box::new(UniformMagnetic { b0 }),
    };
    let initial = free_gaussian_state(grid, a0, t0);
    let opts = CnOptions { record_every, ..Default::default() };
    let family = evolve_cn(&initial, field.as_ref(), &spec, &opts)?;
    let trace = trace_h(&family, |_| mu, policy)?;

    let oracle = |u: &WaveState| -> Option<f64> {
        let phase = match preset {
            Preset::FreeGaussian => Complex64::new(1.0, 0.0),
            Preset::ConstantPotential => Complex64::from_polar(1.0, c * (u.time - t0)),
            Preset::UniformMagnetic => return None,
        };
        let mut exact = free_gaussian_state(grid, a0, u.time);
        exact.values.iter_mut().for_each(|z| *z *= phase);
        Some(u.distance2(&exact).sqrt())
    };
    let max_oracle_error = family.iter().map(oracle).try_fold(0.0f64, |m, e| e.map(|e| m.max(e)));
    let max_h_rel_error_vs_closed_form = match preset {
        Preset::UniformMagnetic => None,
        _ => trace
            .times
            .iter()
            .zip(&trace.h)
            .try_fold(0.0f64, |m, (t, h)| closed_form_h(a0, mu, *t, dim).map(|e| m.max((h / e - 1.0).abs()))),
    };
    let n0 = trace.norm2[0];
    let summary = Summary {
        preset: preset_name,
        dim,
        n,
        half_extent,
        dt,
        steps: spec.steps,
        t0,
        t1,
        a0,
        mu,
        samples: trace.h.len(),
        min_second_difference: log_convexity_scan(&trace.h),
        max_norm_drift: trace.norm2.iter().map(|v| (v / n0 - 1.0).abs()).fold(0.0, f64::max),
        all_admissible: trace.admissible.iter().all(|ok| *ok),
        max_oracle_error,
        max_h_rel_error_vs_closed_form,
    };
    Ok(Run { summary, trace })
}

fn trace_table(trace: &EvolutionTrace) -> Table {
    let mut table = Table::new(["t", "H", "norm2", "admissible_flag"]);
    for i in 0..trace.times.len() {
        table.push(vec![
            fmt_f64(trace.times[i]),
            fmt_f64(trace.h[i]),
            fmt_f64(trace.norm2[i]),
            if trace.admissible[i] { "1" } else { "0" }.to_string(),
        ]);
    }
    table
}

pub fn run_evolve(s: &Settings, a: &EvolveArgs, sinks: &Sinks) -> CliResult<bool> {
    let run = evolve(s, a)?;
    let report = EvolveReport { schema_version: SCHEMA_VERSION, command: "evolve", summary: run.summary };
    sinks.emit(&report, Some(&trace_table(&run.trace)))?;
    Ok(true)
}

pub fn run_convexity(s: &Settings, a: &ConvexityArgs, sinks: &Sinks) -> CliResult<bool> {
    let tol = positive("tol", s.get("tol", a.tol, 1e-6)?)?;
    let run = evolve(s, &a.evolve)?;
    let times = &run.trace.times;
    let (first, last) = (times[0], times[times.len() - 1]);
    let theta: Vec<f64> = times.iter().map(|t| (last - t) / (last - first)).collect();
    let bound_slack =
        convexity_bound_check(&BoundInputs { h: &run.trace.h, t: &[], m: &[], n: 0.0, theta: &theta, eps: 0.0 })?;
    let pass = run.summary.min_second_difference >= -tol && bound_slack >= -tol && run.summary.all_admissible;
    let table = trace_table(&run.trace);
    let report = ConvexityReport {
        schema_version: SCHEMA_VERSION,
        command: "convexity",
        summary: run.summary,
        tol,
        bound_slack,
        pass,
    };
    sinks.emit(&report, Some(&table))?;
    Ok(pass)
}
