use clap::Args;
use serde::Serialize;

use hardylab::example::{critical_weighted_norm, residual_study, Convention, RadialQuadrature};

use super::{pick, positive};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Sinks, Table, SCHEMA_VERSION};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Exponent of the example (must exceed 3/2). Default 2.
    #[arg(long)]
    pub k: Option<f64>,
    /// Number of random off-axis sample points. Default 100.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Finite-difference step. Default 1e-3.
    #[arg(long)]
    pub h: Option<f64>,
    /// Sampling seed. Default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pass threshold on the maximal relative residual. Default 1e-6.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// `sign-corrected` (default) or `uncorrected` potentials.
    #[arg(long)]
    pub convention: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    command: &'static str,
    k: f64,
    samples: usize,
    h: f64,
    seed: u64,
    convention: String,
    threshold: f64,
    max_rel_residual: f64,
    order_estimate: f64,
    norm_t_minus1: f64,
    norm_t_plus1: f64,
    pass: bool,
}

const CONVENTIONS: &[(&str, Convention)] =
    &[("sign-corrected", Convention::SignCorrected), ("uncorrected", Convention::Uncorrected)];

pub fn run(s: &Settings, a: &VerifyArgs, sinks: &Sinks) -> CliResult<bool> {
    let k = s.get("k", a.k, 2.0)?;
    let samples = s.get("samples", a.samples, 100)?;
    let h = s.get("h", a.h, 1e-3)?;
    let seed = s.get("seed", a.seed, 0)?;
    let threshold = positive("threshold", s.get("threshold", a.threshold, 1e-6)?)?;
    let convention_name = s.get("convention", a.convention.clone(), "sign-corrected".to_string())?;
    let convention = pick("convention", &convention_name, CONVENTIONS)?;

    let study = residual_study(k, samples, h, seed, convention)?;
    let norm_minus = critical_weighted_norm(-1.0, k, RadialQuadrature::default())?;
    let norm_plus = critical_weighted_norm(1.0, k, RadialQuadrature::default())?;

    let mut table = Table::new(["h", "max_rel_residual", "order_estimate"]);
    table.push_numbers([h, study.max_rel_residual, study.order_estimate]);
    for level in 1..3 {
        let finer = residual_study(k, samples, h / f64::from(1 << level), seed, convention)?;
        table.push_numbers([finer.h, finer.max_rel_residual, finer.order_estimate]);
    }

    let pass = study.max_rel_residual < threshold;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "verify-example",
        k,
        samples,
        h,
        seed,
        convention: convention_name,
        threshold,
        max_rel_residual: study.max_rel_residual,
        order_estimate: study.order_estimate,
        norm_t_minus1: norm_minus,
        norm_t_plus1: norm_plus,
        pass,
    };
    sinks.emit(&report, Some(&table))?;
    Ok(pass)
}
