use clap::Args;
use serde::Serialize;

use hardylab::convexity::{limit_profile, run_iteration, smallest_root_r, IterationOptions, Verdict};

use super::positive;
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{fmt_f64, Sinks, Table, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct IterateArgs {
    /// Starting constant μ (a₁ ≡ μ).
    #[arg(long)]
    pub mu: Option<f64>,
    /// Odd node count on [-1, 1]. Default 513.
    #[arg(long)]
    pub grid_nodes: Option<usize>,
    /// Sup-norm step below which the iteration has converged. Default 1e-10.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration budget; exceeding it exits with code 3. Default 500.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Divergence threshold on a(0). Default 1e6·μ.
    #[arg(long)]
    pub a_cap: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    command: &'static str,
    mu: f64,
    grid_nodes: usize,
    tol: f64,
    k_max: usize,
    verdict: &'static str,
    k_final: usize,
    /// Sup-norm size of the last update; absent when no update was taken.
    #[serde(skip_serializing_if = "Option::is_none")]
    last_change: Option<f64>,
    a_center: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate: Option<f64>,
    /// Smallest root of μ = R/(4(1+R²)), present for converged runs with μ ≤ 1/8.
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    /// 4·a(0) of the final iterate; equals R at the fixed point.
    #[serde(rename = "R_estimate", skip_serializing_if = "Option::is_none")]
    r_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sup_error_vs_closed_form: Option<f64>,
}

pub fn run(s: &Settings, a: &IterateArgs, sinks: &Sinks) -> CliResult<bool> {
    let defaults = IterationOptions::default();
    let mu = positive("mu", s.require("mu", a.mu)?)?;
    let opts = IterationOptions {
        nodes: s.get("grid_nodes", a.grid_nodes, defaults.nodes)?,
        tol: s.get("tol", a.tol, defaults.tol)?,
        k_max: s.get("k_max", a.k_max, defaults.k_max)?,
        a_cap: s.opt("a_cap", a.a_cap)?,
    };
    let out = run_iteration(mu, &opts)?;
    let last = out.profiles.last().expect("at least the first iterate");

    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: "iterate",
        mu,
        grid_nodes: opts.nodes,
        tol: opts.tol,
        k_max: opts.k_max,
        verdict: out.verdict.name(),
        k_final: out.verdict.k(),
        last_change: out.last_change.is_finite().then_some(out.last_change),
        a_center: last.center_value(),
        gate: None,
        r: None,
        r_estimate: None,
        sup_error_vs_closed_form: None,
    };
    match &out.verdict {
        Verdict::Converged { profile, .. } => {
            report.r_estimate = Some(4.0 * profile.center_value());
            if let Ok(r) = smallest_root_r(mu) {
                report.r = Some(r);
                report.sup_error_vs_closed_form = Some(profile.sup_distance(limit_profile(mu, opts.nodes)?.values()));
            }
        }
        Verdict::GateClosed { gate, .. } => report.gate = Some(*gate),
        Verdict::Unbounded { .. } => {}
    }

    let header = std::iter::once("t".to_string()).chain((1..=out.profiles.len()).map(|k| format!("a_{k}")));
    let mut table = Table::new(header);
    for (i, t) in last.grid().nodes().iter().enumerate() {
        let row = std::iter::once(*t).chain(out.profiles.iter().map(|p| p.values()[i]));
        table.push(row.map(fmt_f64).collect());
    }
    sinks.emit(&report, Some(&table))?;
    Ok(true)
}
