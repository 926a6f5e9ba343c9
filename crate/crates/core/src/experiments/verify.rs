//! Self-check suites run by `qbaker verify`.

use std::fmt;
use std::io;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{format_f64, ExperimentError, ExperimentResult};
use crate::correspondence::{
    bruteforce_series, check_bound_against, divergence_bound, expectation_closed_form, THEOREM_TOLERANCE,
};
use crate::dyadic::Dyadic;
use crate::error::Error;
use crate::hilbert::{qft, BasisLabel, QuantumState, QubitCount, MAX_DENSE_QUBITS, OPERATOR_TOLERANCE};
use crate::propagator::Propagator;
use crate::symbolic::{baker_step, classical_q, decode_phase_point, BitString, PhasePoint, TwoSidedString};

/// Dense `D × D` products are only formed up to this many qubits.
const DENSE_SUITE_CAP: usize = 10;
/// All basis strings are enumerated up to this many qubits; above, a sample.
const EXHAUSTIVE_THEOREM_CAP: usize = 8;
const THEOREM_SAMPLES: usize = 64;
const EXHAUSTIVE_BOUND_CAP: usize = 6;
const BOUND_TAIL_LEN: usize = 10;
const RANDOM_BOUND_INSTANCES: usize = 10_000;
const RANDOM_BOUND_MAX_QUBITS: usize = 32;
const CONJUGACY_SAMPLES: usize = 1_000;

/// Seeds of the sampled parts of each suite, fixed so reports are
/// reproducible.
const THEOREM_SEED: u64 = 0x7431;
const BOUND_SEED: u64 = 0x6232;
const CONJUGACY_SEED: u64 = 0x6333;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Unitarity,
    Theorem1,
    Bounds,
    Conjugacy,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// Test hooks for exercising failure reporting.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyHooks {
    /// Check against half the true bound, which zero-tail strings exceed.
    pub corrupt_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: u64,
    /// Worst observed error (float suites) or smallest margin (exact suites).
    pub worst: String,
    /// Input attaining `worst`.
    pub witness: String,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_max: usize,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

pub fn run_verify(suite: Suite, n_max: usize, hooks: VerifyHooks) -> ExperimentResult<VerifyReport> {
    if n_max == 0 {
        return Err(ExperimentError::config("n-max", "must be at least 1"));
    }
    if n_max > MAX_DENSE_QUBITS {
        return Err(ExperimentError::Capacity(format!("n-max = {n_max} exceeds {MAX_DENSE_QUBITS}")));
    }
    let suites = match suite {
        Suite::All => vec![Suite::Unitarity, Suite::Theorem1, Suite::Bounds, Suite::Conjugacy],
        one => vec![one],
    };
    let suites = suites
        .into_iter()
        .map(|s| match s {
            Suite::Unitarity => unitarity(n_max),
            Suite::Theorem1 => theorem1(n_max),
            Suite::Bounds => bounds(n_max, hooks),
            Suite::Conjugacy => conjugacy(),
            Suite::All => unreachable!(),
        })
        .collect::<ExperimentResult<Vec<_>>>()?;
    Ok(VerifyReport { n_max, suites })
}

fn nq(n: usize) -> QubitCount {
    QubitCount::new(n).expect("suite sizes are in range")
}

/// Tracks the largest float error; the first input reaching it wins ties.
struct Worst {
    value: f64,
    witness: String,
    checks: u64,
    tolerance: f64,
    failure: Option<String>,
}

impl Worst {
    fn new(tolerance: f64) -> Worst {
        Worst { value: 0.0, witness: String::from("-"), checks: 0, tolerance, failure: None }
    }

    fn record(&mut self, value: f64, witness: impl FnOnce() -> String) {
        self.checks += 1;
        let fails = value.is_nan() || value > self.tolerance;
        if value > self.value || (fails && self.failure.is_none()) {
            let w = witness();
            if fails && self.failure.is_none() {
                self.failure = Some(format!("error {} > {} at {w}", format_f64(value), format_f64(self.tolerance)));
            }
            if value > self.value {
                self.value = value;
                self.witness = w;
            }
        }
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            passed: self.failure.is_none(),
            checks: self.checks,
            worst: format_f64(self.value),
            witness: self.witness,
            failure: self.failure,
        }
    }
}

fn unitarity(n_max: usize) -> ExperimentResult<SuiteReport> {
    let mut worst = Worst::new(OPERATOR_TOLERANCE);
    for n in 1..=n_max.min(DENSE_SUITE_CAP) {
        let t = Propagator::new(nq(n)).dense()?;
        worst.record(t.unitarity_error(), || format!("|T^dag T - I|, N = {n}"));
        let f = qft(nq(n))?;
        worst.record(f.unitarity_error(), || format!("|F^dag F - I|, N = {n}"));
    }
    // Structured application on the uniform superposition.
    for n in 1..=n_max {
        let p = Propagator::new(nq(n));
        let uniform = QuantumState::new(nq(n), vec![Complex64::new(1.0, 0.0); nq(n).dim()])?;
        let back = p.inverse_apply(&p.apply(&uniform)?)?;
        worst.record(back.max_abs_diff(&uniform), || format!("T^dag T psi - psi, uniform psi, N = {n}"));
        worst.record((p.apply(&uniform)?.norm() - 1.0).abs(), || format!("| |T psi| - 1 |, uniform psi, N = {n}"));
    }
    Ok(worst.finish(Suite::Unitarity))
}

fn theorem1(n_max: usize) -> ExperimentResult<SuiteReport> {
    let mut worst = Worst::new(THEOREM_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(THEOREM_SEED);
    for n in 1..=n_max {
        let n = nq(n);
        let labels: Vec<BasisLabel> = if n.get() <= EXHAUSTIVE_THEOREM_CAP {
            BasisLabel::all(n).collect()
        } else {
            (0..THEOREM_SAMPLES).map(|_| BasisLabel::from_index(n, rng.random_range(0..n.dim())).unwrap()).collect()
        };
        let per_label = labels
            .par_iter()
            .map(|&xi| {
                let series = bruteforce_series(n, xi, n.get())?;
                (0..=n.get())
                    .map(|m| Ok((m, (series[m] - expectation_closed_form(n, xi, m)?.to_f64()).abs())))
                    .collect::<crate::Result<Vec<_>>>()
            })
            .collect::<crate::Result<Vec<_>>>()?;
        for (xi, errs) in labels.iter().zip(per_label) {
            for (m, err) in errs {
                worst.record(err, || format!("N = {n}, xi = {}, m = {m}", xi.to_bits()));
            }
        }
    }
    Ok(worst.finish(Suite::Theorem1))
}

/// Tracks the smallest exact margin and the first violation.
struct Margins {
    smallest: Option<(Dyadic, String)>,
    checks: u64,
    failure: Option<String>,
}

impl Margins {
    fn record(&mut self, n: usize, xi: &BitString, m: usize, outcome: crate::Result<Dyadic>) -> ExperimentResult<()> {
        self.checks += 1;
        match outcome {
            Ok(margin) => {
                if self.smallest.as_ref().is_none_or(|(s, _)| margin < *s) {
                    self.smallest = Some((margin, format!("N = {n}, xi = {xi}, m = {m}")));
                }
                Ok(())
            }
            Err(e @ Error::BoundViolated { .. }) => {
                if self.failure.is_none() {
                    self.failure = Some(format!("{e} for xi = {xi}"));
                }
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn bounds(n_max: usize, hooks: VerifyHooks) -> ExperimentResult<SuiteReport> {
    let bound_for = |n: QubitCount, m: usize| {
        let b = divergence_bound(n, m);
        if hooks.corrupt_bound {
            b.mul_pow2(-1)
        } else {
            b
        }
    };
    let check =
        |n: QubitCount, xi: &BitString, m: usize| check_bound_against(n, xi, m, bound_for(n, m)).map(|c| c.margin);

    let mut margins = Margins { smallest: None, checks: 0, failure: None };
    for n in 1..=n_max.min(EXHAUSTIVE_BOUND_CAP) {
        let len = n + BOUND_TAIL_LEN;
        let results: Vec<_> = (0u64..1 << len)
            .into_par_iter()
            .map(|word| {
                let xi = BitString::from_bools((0..len).map(|i| (word >> (len - 1 - i)) & 1 == 1).collect()).unwrap();
                let outcomes: Vec<_> = (0..=n).map(|m| check(nq(n), &xi, m)).collect();
                (xi, outcomes)
            })
            .collect();
        for (xi, outcomes) in results {
            for (m, outcome) in outcomes.into_iter().enumerate() {
                margins.record(n, &xi, m, outcome)?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(BOUND_SEED);
    for _ in 0..RANDOM_BOUND_INSTANCES {
        let n = rng.random_range(1..=RANDOM_BOUND_MAX_QUBITS);
        let len = rng.random_range(0..=n + 60);
        let xi = BitString::from_bools((0..len).map(|_| rng.random()).collect()).unwrap();
        let m = rng.random_range(0..=n);
        let outcome = check(nq(n), &xi, m);
        margins.record(n, &xi, m, outcome)?;
    }

    let (worst, witness) = margins.smallest.map_or((String::from("-"), String::from("-")), |(d, w)| (d.to_string(), w));
    Ok(SuiteReport {
        suite: Suite::Bounds,
        passed: margins.failure.is_none(),
        checks: margins.checks,
        worst,
        witness,
        failure: margins.failure,
    })
}

fn conjugacy() -> ExperimentResult<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(CONJUGACY_SEED);
    let mut checks = 0u64;
    let mut failure = None;
    let mut fail = |msg: String| {
        if failure.is_none() {
            failure = Some(msg);
        }
    };
    let random_string = |rng: &mut ChaCha8Rng, max: usize| {
        let len = rng.random_range(0..=max);
        BitString::from_bools((0..len).map(|_| rng.random()).collect()).unwrap()
    };

    for _ in 0..CONJUGACY_SAMPLES {
        let s = TwoSidedString::new(random_string(&mut rng, 16), random_string(&mut rng, 16));
        let lhs = decode_phase_point(&s.shift()?);
        let rhs = baker_step(decode_phase_point(&s));
        checks += 1;
        if lhs != rhs {
            fail(format!("decode(shift(s)) = {lhs:?} but baker_step(decode(s)) = {rhs:?} for {s:?}"));
        }
    }

    for _ in 0..CONJUGACY_SAMPLES {
        let xi = random_string(&mut rng, 64);
        for m in 0..xi.len() {
            checks += 1;
            let (q, next) = (classical_q(&xi, m), classical_q(&xi, m + 1));
            if next != q.mul_pow2(1).fract() {
                fail(format!("q_{} = {next} is not 2 q_{m} mod 1 = {} for xi = {xi}", m + 1, q.mul_pow2(1).fract()));
            }
        }
    }

    for _ in 0..CONJUGACY_SAMPLES {
        let xi = BitString::from_bools((0..12).map(|_| rng.random()).collect()).unwrap();
        let mut x = PhasePoint::new(xi.value(), Dyadic::ZERO)?;
        for m in 0..=8 {
            checks += 1;
            if classical_q(&xi, m) != x.q() {
                fail(format!(
                    "classical_q = {} but iterated map gives {} at m = {m} for xi = {xi}",
                    classical_q(&xi, m),
                    x.q()
                ));
            }
            x = baker_step(x);
        }
    }

    Ok(SuiteReport {
        suite: Suite::Conjugacy,
        passed: failure.is_none(),
        checks,
        worst: String::from(if failure.is_none() { "exact" } else { "mismatch" }),
        witness: String::from("-"),
        failure,
    })
}

pub fn write_verify_csv<W: io::Write>(out: W, report: &VerifyReport) -> ExperimentResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["suite", "passed", "checks", "worst", "witness", "failure"])?;
    for s in &report.suites {
        w.write_record([
            s.suite.to_string(),
            s.passed.to_string(),
            s.checks.to_string(),
            s.worst.clone(),
            s.witness.clone(),
            s.failure.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verify_json<W: io::Write>(out: W, report: &VerifyReport) -> ExperimentResult<()> {
    #[derive(Serialize)]
    struct Echo {
        n_max: usize,
    }
    super::write_envelope(out, "verify", &Echo { n_max: report.n_max }, None, &report.suites)
}
