use std::fmt;
use std::io;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;

use super::{format_f64, write_envelope, ExperimentError, ExperimentResult};
use crate::hilbert::{
    momentum_operator, position_operator, qft, weyl_operators, Operator, QubitCount, MAX_DENSE_QUBITS,
};
use crate::propagator::{PowerKernel, Propagator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DumpTarget {
    Position,
    Momentum,
    Qft,
    WeylU,
    WeylV,
    /// `T`, or `T^m` when a power is given.
    Propagator,
}

impl fmt::Display for DumpTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// Dense matrix of `target` on `n_qubits` qubits. `power` applies only to the
/// propagator.
pub fn dump_operator(target: DumpTarget, n_qubits: usize, power: Option<usize>) -> ExperimentResult<Operator> {
    let n = QubitCount::new(n_qubits).map_err(|e| ExperimentError::config("n-qubits", e.to_string()))?;
    if n.get() > MAX_DENSE_QUBITS {
        return Err(ExperimentError::Capacity(format!("dense matrices need n-qubits <= {MAX_DENSE_QUBITS}, got {n}")));
    }
    if power.is_some() && target != DumpTarget::Propagator {
        return Err(ExperimentError::config("m", format!("a power applies only to the propagator, not {target}")));
    }
    let op = match target {
        DumpTarget::Position => position_operator(n)?,
        DumpTarget::Momentum => momentum_operator(n)?,
        DumpTarget::Qft => qft(n)?,
        DumpTarget::WeylU => weyl_operators(n)?.0,
        DumpTarget::WeylV => weyl_operators(n)?.1,
        DumpTarget::Propagator => match power {
            None => Propagator::new(n).dense()?,
            Some(m) => PowerKernel::new(n, m).map_err(|e| ExperimentError::config("m", e.to_string()))?.dense()?,
        },
    };
    Ok(op)
}

/// One line per row, `re,im` pairs side by side, no header.
pub fn write_operator_csv<W: io::Write>(out: W, op: &Operator) -> ExperimentResult<()> {
    let mut w = csv::WriterBuilder::new().flexible(false).from_writer(out);
    for r in 0..op.dim() {
        w.write_record(op.row(r).iter().flat_map(|z| [format_f64(z.re), format_f64(z.im)]))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DumpEcho {
    operator: DumpTarget,
    n_qubits: usize,
    m: Option<usize>,
    dim: usize,
}

/// Rows of `[re, im]` pairs.
pub fn write_operator_json<W: io::Write>(
    out: W,
    target: DumpTarget,
    n_qubits: usize,
    power: Option<usize>,
    op: &Operator,
) -> ExperimentResult<()> {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..op.dim()).map(|r| op.row(r).iter().map(|z: &Complex64| [z.re, z.im]).collect()).collect();
    let echo = DumpEcho { operator: target, n_qubits, m: power, dim: op.dim() };
    write_envelope(out, "matrix-dump", &echo, None, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_propagator_csv() {
        let op = dump_operator(DumpTarget::Propagator, 1, None).unwrap();
        let mut buf = Vec::new();
        write_operator_csv(&mut buf, &op).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let first: Vec<f64> = lines[0].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, vec![0.5, -0.5, 0.5, 0.5]);
        let second: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(second, vec![0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn csv_round_trips_every_entry() {
        let op = dump_operator(DumpTarget::Momentum, 3, None).unwrap();
        let mut buf = Vec::new();
        write_operator_csv(&mut buf, &op).unwrap();
        for (r, line) in String::from_utf8(buf).unwrap().lines().enumerate() {
            let vals: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(vals.len(), 16);
            for c in 0..8 {
                assert_eq!(Complex64::new(vals[2 * c], vals[2 * c + 1]), op.get(r, c));
            }
        }
    }

    #[test]
    fn power_matches_kernel() {
        let op = dump_operator(DumpTarget::Propagator, 4, Some(2)).unwrap();
        let dense = Propagator::new(QubitCount::new(4).unwrap()).dense_power(2).unwrap();
        assert!(op.max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn json_shape() {
        let op = dump_operator(DumpTarget::WeylU, 2, None).unwrap();
        let mut buf = Vec::new();
        write_operator_json(&mut buf, DumpTarget::WeylU, 2, None, &op).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["config"]["operator"], "weyl-u");
        let rows = v["records"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].as_array().unwrap().len(), 4);
    }

    #[test]
    fn errors() {
        assert_eq!(dump_operator(DumpTarget::Qft, 13, None).unwrap_err().exit_code(), 3);
        assert_eq!(dump_operator(DumpTarget::Qft, 0, None).unwrap_err().exit_code(), 2);
        assert_eq!(dump_operator(DumpTarget::Qft, 3, Some(1)).unwrap_err().exit_code(), 2);
        assert_eq!(dump_operator(DumpTarget::Propagator, 3, Some(4)).unwrap_err().exit_code(), 2);
    }
}
