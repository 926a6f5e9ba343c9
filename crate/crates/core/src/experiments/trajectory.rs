use std::io;

use serde::{Deserialize, Serialize};

use super::{format_f64, write_envelope, ExperimentConfig, ExperimentError, ExperimentResult, StringEcho};
use crate::correspondence::compare_trajectory;
use crate::dyadic::Dyadic;
use crate::hilbert::MAX_STATE_QUBITS;

pub const TRAJECTORY_CSV_HEADER: [&str; 7] =
    ["m", "q_classical", "r_quantum_exact", "r_quantum_numeric", "divergence", "bound", "saturated"];

/// One row of a trajectory run. `divergence` is the signed `q_m − r_m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub m: usize,
    pub q_classical: Dyadic,
    pub q_classical_decimal: String,
    pub r_quantum_exact: Dyadic,
    pub r_quantum_numeric: f64,
    pub divergence: Dyadic,
    pub bound: Dyadic,
    pub saturated: bool,
}

pub fn run_trajectory(cfg: &ExperimentConfig) -> ExperimentResult<Vec<TrajectoryRecord>> {
    let (n, m_max) = cfg.validate()?;
    if n.get() > MAX_STATE_QUBITS {
        return Err(ExperimentError::Capacity(format!(
            "trajectory needs state vectors; n-qubits = {n} exceeds {MAX_STATE_QUBITS}"
        )));
    }
    let xi = cfg.string.materialize(n)?;
    let rows = compare_trajectory(n, &xi, m_max)?;
    Ok(rows
        .into_iter()
        .map(|row| TrajectoryRecord {
            m: row.m,
            q_classical: row.q_classical,
            q_classical_decimal: row.q_classical.to_decimal_string(),
            r_quantum_exact: row.r_exact,
            r_quantum_numeric: row.r_numeric,
            divergence: row.difference,
            bound: row.bound,
            saturated: row.saturated(),
        })
        .collect())
}

pub fn write_trajectory_csv<W: io::Write>(out: W, records: &[TrajectoryRecord]) -> ExperimentResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.m.to_string(),
            r.q_classical.to_string(),
            r.r_quantum_exact.to_string(),
            format_f64(r.r_quantum_numeric),
            r.divergence.to_string(),
            r.bound.to_string(),
            r.saturated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryEcho {
    n_qubits: usize,
    m_max: usize,
    string: StringEcho,
    bits_used: String,
}

pub fn write_trajectory_json<W: io::Write>(
    out: W,
    cfg: &ExperimentConfig,
    records: &[TrajectoryRecord],
) -> ExperimentResult<()> {
    let (n, m_max) = cfg.validate()?;
    let echo = TrajectoryEcho {
        n_qubits: n.get(),
        m_max,
        string: cfg.string.describe(),
        bits_used: cfg.string.materialize(n)?.to_string(),
    };
    write_envelope(out, "trajectory", &echo, cfg.string.seed(), records)
}

#[derive(Deserialize)]
struct CsvRow {
    m: usize,
    q_classical: Dyadic,
    r_quantum_exact: Dyadic,
    r_quantum_numeric: f64,
    divergence: Dyadic,
    bound: Dyadic,
    saturated: bool,
}

/// Reads back a file written by [`write_trajectory_csv`].
pub fn read_trajectory_csv<R: io::Read>(input: R) -> ExperimentResult<Vec<TrajectoryRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != TRAJECTORY_CSV_HEADER {
        return Err(ExperimentError::config("csv header", format!("unexpected header {header:?}")));
    }
    rdr.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(TrajectoryRecord {
                m: row.m,
                q_classical: row.q_classical,
                q_classical_decimal: row.q_classical.to_decimal_string(),
                r_quantum_exact: row.r_quantum_exact,
                r_quantum_numeric: row.r_quantum_numeric,
                divergence: row.divergence,
                bound: row.bound,
                saturated: row.saturated,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{OutputFormat, StringSpec, Tail};

    fn cfg(n: usize, bits: &str, m_max: Option<usize>) -> ExperimentConfig {
        ExperimentConfig {
            n_qubits: n,
            string: StringSpec::explicit(bits.parse().unwrap()),
            m_max,
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn zero_tail_example() {
        let recs = run_trajectory(&cfg(3, "110", Some(3))).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[1].r_quantum_exact, Dyadic::new(5, 3));
        assert_eq!(recs[3].r_quantum_exact, Dyadic::HALF);
        assert!(recs.iter().all(|r| r.saturated));
    }

    #[test]
    fn smallest_instance() {
        let recs = run_trajectory(&cfg(1, "0", Some(0))).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].r_quantum_exact, Dyadic::new(1, 2));
        assert_eq!(recs[0].q_classical, Dyadic::ZERO);
        assert_eq!(recs[0].divergence, Dyadic::new(-1, 2));
        assert_eq!(recs[0].r_quantum_numeric, 0.25);
    }

    #[test]
    fn capacity_error() {
        let err = run_trajectory(&cfg(25, "1", None)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut c = cfg(9, "", None);
        c.string = StringSpec::random(30, 99).with_tail(Tail::Ones);
        let recs = run_trajectory(&c).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m,q_classical,r_quantum_exact,r_quantum_numeric,divergence,bound,saturated\n"));
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn json_and_csv_carry_the_same_values() {
        let mut c = cfg(6, "", Some(6));
        c.string = StringSpec::random(20, 3);
        let recs = run_trajectory(&c).unwrap();
        let mut json = Vec::new();
        write_trajectory_json(&mut json, &c, &recs).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["seed"], 3);
        assert_eq!(v["config"]["string"]["random_len"], 20);
        let rows = v["records"].as_array().unwrap();
        assert_eq!(rows.len(), recs.len());
        for (row, rec) in rows.iter().zip(&recs) {
            assert_eq!(row["m"].as_u64().unwrap() as usize, rec.m);
            assert_eq!(row["q_classical"].as_str().unwrap().parse::<Dyadic>().unwrap(), rec.q_classical);
            assert_eq!(row["r_quantum_exact"].as_str().unwrap().parse::<Dyadic>().unwrap(), rec.r_quantum_exact);
            assert_eq!(row["r_quantum_numeric"].as_f64().unwrap(), rec.r_quantum_numeric);
            assert_eq!(row["divergence"].as_str().unwrap().parse::<Dyadic>().unwrap(), rec.divergence);
            assert_eq!(row["bound"].as_str().unwrap().parse::<Dyadic>().unwrap(), rec.bound);
            assert_eq!(row["saturated"].as_bool().unwrap(), rec.saturated);
        }
    }
}
