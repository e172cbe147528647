//! Resolution sweep: how the lattice CHSH statistics approach the
//! continuum as `p` grows, while the fraction of undefined table cells
//! stays put.

use serde::Serialize;

use crate::chsh::{chsh_s_value, completability_scan, correlation_max_error, tsirelson_gap, DetectorAngles};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;

/// CSV column order.
pub const SWEEP_HEADER: [&str; 5] = [
    "p",
    "s_value_abs",
    "s_error",
    "undefined_cell_fraction",
    "correlation_max_error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub s_value_abs: f64,
    /// `| |S| - 2√2 |`.
    pub s_error: f64,
    pub undefined_cell_fraction: ExactRational,
    pub correlation_max_error: f64,
}

pub fn sweep_row(p: DiscretisationParam, trials: u64, seed: u64, exec: Execution) -> Result<SweepRow> {
    let angles = DetectorAngles::optimal();
    let s = chsh_s_value(p, &angles)?;
    let scan = completability_scan(p, trials, seed, exec)?;
    Ok(SweepRow {
        p: p.get(),
        s_value_abs: s.abs().to_f64(),
        s_error: tsirelson_gap(&s).to_f64(),
        undefined_cell_fraction: scan.undefined_cell_fraction(),
        correlation_max_error: correlation_max_error(p, &angles)?.to_f64(),
    })
}

/// One row per `p`, in the given order.
pub fn sweep(p_list: &[DiscretisationParam], trials: u64, seed: u64, exec: Execution) -> Result<Vec<SweepRow>> {
    p_list.iter().map(|&p| sweep_row(p, trials, seed, exec)).collect()
}

/// Checks every row against its bounds and, for increasing `p`, that the
/// correlation error strictly decreases.
pub fn check_sweep(rows: &[SweepRow]) -> Result<()> {
    let quarter = ExactRational::new(1, 4)?;
    for r in rows {
        let p = r.p as f64;
        if r.undefined_cell_fraction != quarter {
            return Err(Error::InvariantBreach(format!(
                "p = {}: undefined cell fraction {} is not 1/4",
                r.p, r.undefined_cell_fraction
            )));
        }
        if r.correlation_max_error > 1.0 / p {
            return Err(Error::InvariantBreach(format!(
                "p = {}: correlation error {} exceeds 1/p",
                r.p, r.correlation_max_error
            )));
        }
        if r.s_error > 4.0 / p {
            return Err(Error::InvariantBreach(format!("p = {}: |S| misses 2√2 by {}", r.p, r.s_error)));
        }
    }
    for w in rows.windows(2) {
        if w[1].p > w[0].p && w[1].correlation_max_error >= w[0].correlation_max_error {
            return Err(Error::InvariantBreach(format!(
                "correlation error does not decrease from p = {} to p = {}",
                w[0].p, w[1].p
            )));
        }
    }
    Ok(())
}
