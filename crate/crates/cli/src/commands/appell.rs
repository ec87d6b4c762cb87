use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use hardylab::appell::{appell_wave, gaussian_weighted_norm, to_symmetric_interval, AlphaBeta, ClipPolicy};
use hardylab::propagator::{free_gaussian_oracle, weighted_h};
use hardylab::wave::{SpatialGrid, WaveState};

use super::{pick, positive};
use crate::config::Settings;
use crate::error::{bad, CliResult};
use crate::output::{Sinks, Table, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct AppellArgs {
    /// Decay rate at time 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Decay rate at time 0.
    #[arg(long)]
    pub beta: Option<f64>,
    /// `free-gaussian` (default) or `constant-potential`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Source data exp(-a0 x²) at time 0. Default 0.5.
    #[arg(long)]
    pub a0: Option<f64>,
    /// Real potential for `constant-potential`. Default 0.5.
    #[arg(long)]
    pub c: Option<f64>,
    /// Half width of the 1D grid. Default 20.
    #[arg(long)]
    pub half_extent: Option<f64>,
    /// Grid points. Default 2049.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of target times, evenly spaced on [0, 1]. Default 5.
    #[arg(long)]
    pub times: Option<usize>,
    /// Pass threshold on all relative identity errors. Default 1e-6.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Preset {
    FreeGaussian,
    ConstantPotential,
}

const PRESETS: &[(&str, Preset)] =
    &[("free-gaussian", Preset::FreeGaussian), ("constant-potential", Preset::ConstantPotential)];

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    command: &'static str,
    preset: String,
    alpha: f64,
    beta: f64,
    mu: f64,
    symmetric: bool,
    times: usize,
    /// Largest nodewise |ũ - u| when α = β (the transform is then the identity).
    #[serde(skip_serializing_if = "Option::is_none")]
    identity_max_deviation: Option<f64>,
    /// `max_t |‖ũ(t)‖² / ‖u(s(t))‖² - 1|`.
    plain_norm_max_rel_error: f64,
    /// `|‖e^{|x|²/(αβ)} ũ(0)‖ / ‖e^{|x|²/β²} u(0)‖ - 1|`.
    weighted_identity_rel_error: f64,
    /// Norm identities of the map to [-1, 1]: plain at every time, weighted at t = 0.
    interval_chain_max_rel_error: f64,
    max_clipped: f64,
    tol: f64,
    pass: bool,
}

pub fn run(s: &Settings, a: &AppellArgs, sinks: &Sinks) -> CliResult<bool> {
    let alpha = s.require("alpha", a.alpha)?;
    let beta = s.require("beta", a.beta)?;
    let preset_name = s.get("preset", a.preset.clone(), "free-gaussian".to_string())?;
    let preset = pick("preset", &preset_name, PRESETS)?;
    let a0 = positive("a0", s.get("a0", a.a0, 0.5)?)?;
    let c = s.get("c", a.c, 0.5)?;
    let half = s.get("half_extent", a.half_extent, 20.0)?;
    let n = s.get("n", a.n, 2049)?;
    let times = s.get("times", a.times, 5)?;
    let tol = positive("tol", s.get("tol", a.tol, 1e-6)?)?;
    if times < 2 {
        return Err(bad(format!("times must be at least 2, got {times}")));
    }
    let ab = AlphaBeta::new(alpha, beta)?;
    let grid = SpatialGrid::new(1, half, n)?;

    let source = |time: f64| {
        let phase = match preset {
            Preset::FreeGaussian => Complex64::new(1.0, 0.0),
            Preset::ConstantPotential => Complex64::from_polar(1.0, c * time),
        };
        WaveState::from_fn(grid, time, |x| free_gaussian_oracle(a0, x[0], time) * phase)
    };
    let policy = ClipPolicy::default();
    let weight = 1.0 / (alpha * beta);

    let mut table = Table::new(["t", "source_time", "plain_norm_ratio", "clipped"]);
    let (mut identity, mut plain, mut chain, mut clipped) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..times {
        let t = i as f64 / (times - 1) as f64;
        let u = source(ab.source_time(t));
        let tu = appell_wave(&u, &ab, t, policy)?;
        let ratio = tu.wave.norm2() / u.norm2();
        plain = plain.max((ratio - 1.0).abs());
        identity = identity.max(tu.wave.max_distance(&u));
        let v = to_symmetric_interval(&tu.wave, policy)?;
        chain = chain.max((v.wave.norm2() / tu.wave.norm2() - 1.0).abs());
        clipped = clipped.max(tu.clipped).max(v.clipped);
        table.push_numbers([t, u.time, ratio, tu.clipped]);
    }

    // Weighted identities at t = 0; both sides are checked for admissibility first.
    let u0 = source(0.0);
    let tu0 = appell_wave(&u0, &ab, 0.0, policy)?;
    let lhs = weighted_h(&tu0.wave, weight)?.sqrt();
    let rhs = weighted_h(&u0, 1.0 / (beta * beta))?.sqrt();
    let weighted = (lhs / rhs - 1.0).abs();
    let v0 = to_symmetric_interval(&tu0.wave, policy)?;
    chain = chain.max((gaussian_weighted_norm(&v0.wave, 0.5 * weight) / lhs - 1.0).abs());

    let symmetric = ab.is_symmetric();
    let identity_max_deviation = symmetric.then_some(identity);
    let pass = plain < tol && weighted < tol && chain < tol && identity_max_deviation.map_or(true, |d| d == 0.0);
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "appell-check",
        preset: preset_name,
        alpha,
        beta,
        mu: ab.mu(),
        symmetric,
        times,
        identity_max_deviation,
        plain_norm_max_rel_error: plain,
        weighted_identity_rel_error: weighted,
        interval_chain_max_rel_error: chain,
        max_clipped: clipped,
        tol,
        pass,
    };
    sinks.emit(&report, Some(&table))?;
    Ok(pass)
}
