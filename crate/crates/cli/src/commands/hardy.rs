use clap::Args;
use serde::Serialize;

use hardylab::convexity::{hardy_verdict, HardyVerdict};

use crate::config::Settings;
use crate::error::{bad, CliResult};
use crate::output::{Sinks, Table, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct HardyArgs {
    /// Decay rate at time 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Decay rate at time 0.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Samples of the profile on [0, 1] in the CSV table. Default 101.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    command: &'static str,
    alpha: f64,
    beta: f64,
    mu: f64,
    verdict: &'static str,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    /// `[a(0), a(1)] = [1/β², 1/α²]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    a_endpoints: Option<[f64; 2]>,
}

pub fn run(s: &Settings, a: &HardyArgs, sinks: &Sinks) -> CliResult<bool> {
    let alpha = s.require("alpha", a.alpha)?;
    let beta = s.require("beta", a.beta)?;
    let nodes = s.get("nodes", a.nodes, 101)?;
    if nodes < 2 {
        return Err(bad(format!("nodes must be at least 2, got {nodes}")));
    }
    let verdict = hardy_verdict(alpha, beta)?;
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: "hardy",
        alpha,
        beta,
        mu: 1.0 / (2.0 * alpha * beta),
        verdict: "MustVanish",
        r: None,
        a_endpoints: None,
    };
    let mut table = Table::new(["t", "a"]);
    if let HardyVerdict::Profile(p) = verdict {
        report.verdict = "Profile";
        report.r = Some(p.r);
        report.a_endpoints = Some(p.endpoints());
        for i in 0..nodes {
            let t = i as f64 / (nodes - 1) as f64;
            table.push_numbers([t, p.eval(t)]);
        }
    }
    sinks.emit(&report, Some(&table))?;
    Ok(true)
}
