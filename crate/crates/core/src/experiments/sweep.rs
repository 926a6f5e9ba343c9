use std::io;

use rayon::prelude::*;
use serde::Serialize;

use super::{write_envelope, ExperimentError, ExperimentResult, StringEcho, StringSpec};
use crate::correspondence::timescale;
use crate::dyadic::Dyadic;
use crate::hilbert::QubitCount;

pub const SWEEP_CSV_HEADER: [&str; 7] = ["n_qubits", "m", "t_h", "divergence", "bound", "margin", "saturated"];

/// One `(N, m)` cell: `|r_m − q_m|` against `h·2^{m−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub n_qubits: usize,
    pub m: usize,
    pub t_h: usize,
    pub divergence: Dyadic,
    pub bound: Dyadic,
    pub margin: Dyadic,
    pub saturated: bool,
}

/// Timescale tables for every `N` in `n_range`, concatenated in the order
/// given. Only exact arithmetic is involved, so any `N` up to the qubit
/// limit is allowed.
pub fn run_timescale_sweep(n_range: &[usize], spec: &StringSpec) -> ExperimentResult<Vec<SweepRow>> {
    let ns = n_range
        .iter()
        .map(|&n| QubitCount::new(n).map_err(|e| ExperimentError::config("n-qubits", e.to_string())))
        .collect::<ExperimentResult<Vec<_>>>()?;
    let tables = ns
        .par_iter()
        .map(|&n| {
            let xi = spec.materialize(n)?;
            let report = timescale(n, &xi)?;
            Ok(report
                .steps
                .iter()
                .map(|s| SweepRow {
                    n_qubits: n.get(),
                    m: s.m,
                    t_h: report.t_h,
                    divergence: s.divergence,
                    bound: s.bound,
                    margin: s.margin(),
                    saturated: s.margin().is_zero(),
                })
                .collect::<Vec<_>>())
        })
        .collect::<ExperimentResult<Vec<_>>>()?;
    Ok(tables.into_iter().flatten().collect())
}

pub fn write_sweep_csv<W: io::Write>(out: W, rows: &[SweepRow]) -> ExperimentResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n_qubits.to_string(),
            r.m.to_string(),
            r.t_h.to_string(),
            r.divergence.to_string(),
            r.bound.to_string(),
            r.margin.to_string(),
            r.saturated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepEcho<'a> {
    n_range: &'a [usize],
    string: StringEcho,
}

pub fn write_sweep_json<W: io::Write>(
    out: W,
    n_range: &[usize],
    spec: &StringSpec,
    rows: &[SweepRow],
) -> ExperimentResult<()> {
    let echo = SweepEcho { n_range, string: spec.describe() };
    write_envelope(out, "timescale", &echo, spec.seed(), rows)
}
