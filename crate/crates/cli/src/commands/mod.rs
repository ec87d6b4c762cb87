pub mod appell;
pub mod evolve;
pub mod gauge;
pub mod hardy;
pub mod iterate;
pub mod verify;

use crate::error::{bad, CliResult};

/// Match `name` against a preset list; unknown names are bad input.
pub(crate) fn pick<'a, T: Copy>(kind: &str, name: &str, table: &'a [(&'a str, T)]) -> CliResult<T> {
    table.iter().find(|(n, _)| *n == name).map(|(_, v)| *v).ok_or_else(|| {
        let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
        bad(format!("unknown {kind} {name:?}; expected one of {}", known.join(", ")))
    })
}

pub(crate) fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("{key} must be positive, got {v}")))
    }
}
