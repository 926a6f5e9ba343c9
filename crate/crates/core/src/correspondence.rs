//! Quantum position mean `r_m = ⟨ξ|T^m q̂ T^{−m}|ξ⟩` against the classical
//! trajectory `q_m`.
//!
//! The closed form is exact:
//!
//! ```text
//! r_m = Σ_{k=1}^{N−m} ξ_{m+k} 2^{−k} + 2^{−(N−m+1)},   0 ≤ m ≤ N,   r_N = 1/2
//! ```
//!
//! so the gap to the classical value is
//! `q_m − r_m = Σ_{j>N−m} ξ_{m+j} 2^{−j} − 2^{−(N−m+1)}`, bounded in modulus by
//! `2^{−(N−m+1)} = h·2^{m−1}`. The bound is attained by every string whose
//! bits past `N` vanish, and grows to `1/2` at `m = t_h = N = log₂(1/h)`.
//!
//! Everything on the closed-form side is [`Dyadic`]; floating point only
//! appears in the brute-force evaluation used to cross-check it.

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::hilbert::{BasisLabel, QuantumState, QubitCount, MAX_STATE_QUBITS};
use crate::propagator::{PowerKernel, Propagator};
use crate::symbolic::{classical_q, BitString};

/// Allowed gap between brute-force and closed-form expectation values.
pub const THEOREM_TOLERANCE: f64 = 1e-9;

fn check_time(n: QubitCount, m: usize) -> Result<()> {
    if m > n.get() {
        return Err(Error::TimeOutOfRange { m, n: n.get() });
    }
    Ok(())
}

/// `r_m` in closed form.
pub fn expectation_closed_form(n: QubitCount, xi: BasisLabel, m: usize) -> Result<Dyadic> {
    check_time(n, m)?;
    if m == n.get() {
        return Ok(Dyadic::HALF);
    }
    let shifted = xi.to_bits().tail_value(m);
    Ok(shifted + divergence_bound(n, m))
}

/// How `expectation_bruteforce` obtains `|⟨ξ|T^m|j⟩|²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteForce {
    /// Closed-form matrix elements of `T^m`; needs `m ≤ N`.
    Kernel,
    /// `m` applications of `T†` to `|ξ⟩`; any `m`.
    Evolution,
}

/// `Σ_j q_j |⟨ξ|T^m|j⟩|²` summed over the whole basis.
pub fn expectation_bruteforce(n: QubitCount, xi: BasisLabel, m: usize, method: BruteForce) -> Result<f64> {
    n.require_at_most(MAX_STATE_QUBITS, "brute-force expectation")?;
    match method {
        BruteForce::Kernel => {
            let kernel = PowerKernel::new(n, m)?;
            let d = n.dim() as f64;
            Ok(BasisLabel::all(n).map(|j| (j.index() as f64 + 0.5) / d * kernel.element(xi, j).norm_sqr()).sum())
        }
        BruteForce::Evolution => {
            let psi = Propagator::new(n).evolve_back(&QuantumState::basis(xi)?, m)?;
            Ok(psi.position_expectation())
        }
    }
}

/// `r_0, r_1, …, r_{m_max}` by stepping `T†` once per time step.
pub fn bruteforce_series(n: QubitCount, xi: BasisLabel, m_max: usize) -> Result<Vec<f64>> {
    n.require_at_most(MAX_STATE_QUBITS, "brute-force expectation")?;
    let prop = Propagator::new(n);
    let mut psi = QuantumState::basis(xi)?;
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(psi.position_expectation());
    for _ in 0..m_max {
        psi = prop.inverse_apply(&psi)?;
        out.push(psi.position_expectation());
    }
    Ok(out)
}

/// `2^{−(N−m+1)}`.
pub fn divergence_bound(n: QubitCount, m: usize) -> Dyadic {
    Dyadic::pow2(m as i32 - n.get() as i32 - 1)
}

/// `h·2^{m−1}`, the same number written through the Planck constant.
pub fn planck_bound(n: QubitCount, m: usize) -> Dyadic {
    n.planck().mul_pow2(m as i32 - 1)
}

/// `Σ_{j=N−m+1}^{L−m} ξ_{m+j} 2^{−j} − 2^{−(N−m+1)}`, term by term.
pub fn difference_series(n: QubitCount, xi_full: &BitString, m: usize) -> Result<Dyadic> {
    check_time(n, m)?;
    let (n, len) = (n.get(), xi_full.len());
    let tail: Dyadic =
        (n - m + 1..=len.saturating_sub(m)).filter(|&j| xi_full.bit(m + j)).map(|j| Dyadic::pow2(-(j as i32))).sum();
    Ok(tail - Dyadic::pow2(-((n - m + 1) as i32)))
}

/// `q_m − r_m`, where the quantum system starts in `|ξ₁…ξ_N⟩` and the
/// classical trajectory uses the whole string.
///
/// Computed both by direct subtraction and by the tail series; a mismatch is
/// reported as [`Error::Inconsistency`].
pub fn difference(n: QubitCount, xi_full: &BitString, m: usize) -> Result<Dyadic> {
    let r = expectation_closed_form(n, BasisLabel::from_prefix(n, xi_full), m)?;
    let direct = classical_q(xi_full, m) - r;
    let series = difference_series(n, xi_full, m)?;
    if direct != series {
        return Err(Error::Inconsistency(format!(
            "q_m - r_m = {direct} by subtraction but {series} by tail series (N = {n}, m = {m}, xi = {xi_full})"
        )));
    }
    Ok(direct)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `bound − |q_m − r_m|`, never negative when `holds`.
    pub margin: Dyadic,
}

fn compare_to_bound(n: QubitCount, m: usize, divergence: Dyadic, bound: Dyadic) -> Result<BoundCheck> {
    let margin = bound - divergence.abs();
    if margin.is_negative() {
        return Err(Error::BoundViolated { n: n.get(), m, divergence: divergence.abs(), bound });
    }
    Ok(BoundCheck { holds: true, margin })
}

/// `|r_m − q_m| ≤ 2^{−(N−m+1)}`. A violation can only mean a bug and comes
/// back as [`Error::BoundViolated`].
pub fn check_bound(n: QubitCount, xi_full: &BitString, m: usize) -> Result<BoundCheck> {
    check_bound_against(n, xi_full, m, divergence_bound(n, m))
}

/// [`check_bound`] with a caller-supplied bound, for exercising the failure
/// path.
pub fn check_bound_against(n: QubitCount, xi_full: &BitString, m: usize, bound: Dyadic) -> Result<BoundCheck> {
    let diff = difference(n, xi_full, m)?;
    compare_to_bound(n, m, diff, bound)
}

/// One time step of a quantum/classical comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationResult {
    pub m: usize,
    pub r_exact: Dyadic,
    pub r_numeric: f64,
    pub q_classical: Dyadic,
    /// `q_m − r_m`.
    pub difference: Dyadic,
    /// `2^{−(N−m+1)}`.
    pub bound: Dyadic,
}

impl ExpectationResult {
    pub fn saturated(&self) -> bool {
        self.difference.abs() == self.bound
    }
}

/// Exact and brute-force values for `m = 0 … m_max`, with every invariant
/// checked on the way.
pub fn compare_trajectory(n: QubitCount, xi_full: &BitString, m_max: usize) -> Result<Vec<ExpectationResult>> {
    check_time(n, m_max)?;
    let label = BasisLabel::from_prefix(n, xi_full);
    let numeric = bruteforce_series(n, label, m_max)?;
    numeric
        .into_iter()
        .enumerate()
        .map(|(m, r_numeric)| {
            let r_exact = expectation_closed_form(n, label, m)?;
            let difference = difference(n, xi_full, m)?;
            let bound = divergence_bound(n, m);
            compare_to_bound(n, m, difference, bound)?;
            if (r_numeric - r_exact.to_f64()).abs() > THEOREM_TOLERANCE {
                return Err(Error::Inconsistency(format!(
                    "brute force r_{m} = {r_numeric} differs from closed form {r_exact}"
                )));
            }
            Ok(ExpectationResult { m, r_exact, r_numeric, q_classical: classical_q(xi_full, m), difference, bound })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceStep {
    pub m: usize,
    /// `|r_m − q_m|`.
    pub divergence: Dyadic,
    /// `h·2^{m−1}`.
    pub bound: Dyadic,
}

impl DivergenceStep {
    pub fn margin(&self) -> Dyadic {
        self.bound - self.divergence
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimescaleReport {
    pub n: QubitCount,
    /// `log₂(1/h)`.
    pub t_h: usize,
    /// One entry per `m = 0 … N`.
    pub steps: Vec<DivergenceStep>,
    /// Every step attains its bound.
    pub saturated: bool,
}

impl TimescaleReport {
    /// Largest bound over `m < t_h`; `1/4` whenever `N ≥ 1`.
    pub fn max_bound_before_timescale(&self) -> Option<Dyadic> {
        self.steps.iter().filter(|s| s.m < self.t_h).map(|s| s.bound).max()
    }
}

pub fn timescale(n: QubitCount, xi_full: &BitString) -> Result<TimescaleReport> {
    let h = n.planck();
    debug_assert_eq!(h.numerator(), 1);
    let t_h = h.log2_denom() as usize;
    let steps = (0..=n.get())
        .map(|m| {
            let divergence = difference(n, xi_full, m)?.abs();
            let bound = planck_bound(n, m);
            compare_to_bound(n, m, divergence, bound)?;
            Ok(DivergenceStep { m, divergence, bound })
        })
        .collect::<Result<Vec<_>>>()?;
    let saturated = steps.iter().all(|s| s.margin().is_zero());
    Ok(TimescaleReport { n, t_h, steps, saturated })
}

/// `|r_m − q_m|` at fixed `m` as `N` varies: the `h → 0` approach to the
/// classical value.
pub fn convergence_scan(m: usize, xi_full: &BitString, n_range: &[QubitCount]) -> Result<Vec<(QubitCount, Dyadic)>> {
    if let Some(&smallest) = n_range.iter().min() {
        check_time(smallest, m)?;
    }
    n_range.iter().map(|&n| Ok((n, difference(n, xi_full, m)?.abs()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nq(n: usize) -> QubitCount {
        QubitCount::new(n).unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn d(n: i128, k: u32) -> Dyadic {
        Dyadic::new(n, k)
    }

    fn label(n: usize, bits: &str) -> BasisLabel {
        BasisLabel::from_bits(nq(n), &bs(bits)).unwrap()
    }

    fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
        BitString::from_bools((0..len).map(|_| rng.random()).collect()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(expectation_closed_form(nq(3), label(3, "110"), 1).unwrap(), d(5, 3));
        for xi in BasisLabel::all(nq(3)) {
            assert_eq!(expectation_closed_form(nq(3), xi, 3).unwrap(), Dyadic::HALF);
        }
        assert!(matches!(expectation_closed_form(nq(3), label(3, "110"), 4), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn closed_form_endpoint_agrees_with_general_formula() {
        for n in 1..=10 {
            for xi in BasisLabel::all(nq(n)) {
                let general = xi.to_bits().tail_value(n) + divergence_bound(nq(n), n);
                assert_eq!(general, Dyadic::HALF);
                assert_eq!(expectation_closed_form(nq(n), xi, n).unwrap(), general);
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        for n in 1..=4 {
            for xi in BasisLabel::all(nq(n)) {
                let want = (xi.index() as f64 + 0.5) / nq(n).dim() as f64;
                assert_eq!(expectation_bruteforce(nq(n), xi, 0, BruteForce::Kernel).unwrap(), want);
                assert_eq!(expectation_bruteforce(nq(n), xi, 0, BruteForce::Evolution).unwrap(), want);
            }
        }
        let r = expectation_bruteforce(nq(2), label(2, "10"), 2, BruteForce::Kernel).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xi = BasisLabel::from_index(nq(5), rng.random_range(0..32)).unwrap();
        let r = expectation_bruteforce(nq(5), xi, 3, BruteForce::Evolution).unwrap();
        assert!((r - expectation_closed_form(nq(5), xi, 3).unwrap().to_f64()).abs() <= 1e-10);
        assert!(matches!(
            expectation_bruteforce(nq(2), xi_zero(2), 3, BruteForce::Kernel),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(expectation_bruteforce(nq(2), xi_zero(2), 7, BruteForce::Evolution).is_ok());
    }

    fn xi_zero(n: usize) -> BasisLabel {
        BasisLabel::from_index(nq(n), 0).unwrap()
    }

    #[test]
    fn theorem_exhaustive_small() {
        for n in 1..=6 {
            for xi in BasisLabel::all(nq(n)) {
                let series = bruteforce_series(nq(n), xi, n).unwrap();
                for m in 0..=n {
                    let exact = expectation_closed_form(nq(n), xi, m).unwrap().to_f64();
                    let kernel = expectation_bruteforce(nq(n), xi, m, BruteForce::Kernel).unwrap();
                    assert!((series[m] - exact).abs() <= THEOREM_TOLERANCE);
                    assert!((kernel - series[m]).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn difference_examples() {
        for n in 1..=8 {
            let xi = bs(&"1".repeat(n));
            for m in 0..=n {
                assert_eq!(difference(nq(n), &xi, m).unwrap(), -divergence_bound(nq(n), m));
            }
            assert_eq!(difference(nq(n), &xi, 0).unwrap(), -nq(n).planck().mul_pow2(-1));
        }
        let xi = bs("10111111");
        let direct = classical_q(&xi, 2) - expectation_closed_form(nq(4), label(4, "1011"), 2).unwrap();
        assert_eq!(difference_series(nq(4), &xi, 2).unwrap(), direct);
        assert_eq!(difference(nq(4), &xi, 2).unwrap(), direct);
        // q_2 = 0.111111 = 63/64, r_2 = 0.11 + 1/8 = 7/8
        assert_eq!(direct, d(7, 6));
    }

    #[test]
    fn difference_with_short_string_is_zero_padded() {
        assert_eq!(difference(nq(4), &bs("1"), 1).unwrap(), -d(1, 4));
        assert_eq!(difference(nq(4), &bs(""), 0).unwrap(), -d(1, 5));
    }

    #[test]
    fn check_bound_zero_tail_saturates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=10 {
            let xi = random_bits(&mut rng, n);
            for m in 0..=n {
                assert_eq!(check_bound(nq(n), &xi, m).unwrap(), BoundCheck { holds: true, margin: Dyadic::ZERO });
            }
        }
    }

    #[test]
    fn check_bound_ones_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=10 {
            let len = n + 40;
            let xi = random_bits(&mut rng, n).concat(&bs(&"1".repeat(40))).unwrap();
            for m in 0..=n {
                let diff = difference(nq(n), &xi, m).unwrap();
                assert!(diff > Dyadic::ZERO);
                let check = check_bound(nq(n), &xi, m).unwrap();
                assert_eq!(check.margin, Dyadic::pow2(-((len - m) as i32)));
                assert_eq!(diff, divergence_bound(nq(n), m) - check.margin);
            }
        }
    }

    #[test]
    fn check_bound_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.random_range(1..=30);
            let len = rng.random_range(0..=n + 50);
            let xi = random_bits(&mut rng, len);
            let m = rng.random_range(0..=n);
            let check = check_bound(nq(n), &xi, m).unwrap();
            assert!(check.holds && !check.margin.is_negative());
        }
    }

    #[test]
    fn corrupted_bound_is_reported() {
        let n = nq(4);
        let tight = divergence_bound(n, 2).mul_pow2(-1);
        assert!(matches!(check_bound_against(n, &bs("1011"), 2, tight), Err(Error::BoundViolated { n: 4, m: 2, .. })));
    }

    #[test]
    fn bound_forms_agree() {
        for n in 1..=40 {
            for m in 0..=n {
                assert_eq!(divergence_bound(nq(n), m), planck_bound(nq(n), m));
            }
        }
    }

    #[test]
    fn saturation_doubles_each_step() {
        for n in 1..=12 {
            let xi = BasisLabel::from_index(nq(n), (n * 37) % nq(n).dim()).unwrap().to_bits();
            let mut prev: Option<Dyadic> = None;
            for m in 0..=n {
                let r = expectation_closed_form(nq(n), BasisLabel::from_prefix(nq(n), &xi), m).unwrap();
                let gap = r - classical_q(&xi, m);
                assert_eq!(gap, planck_bound(nq(n), m));
                if let Some(p) = prev {
                    assert_eq!(gap, p.mul_pow2(1));
                }
                prev = Some(gap);
            }
            assert_eq!(prev, Some(Dyadic::HALF));
        }
    }

    #[test]
    fn timescale_examples() {
        let report = timescale(nq(10), &bs("1100101011")).unwrap();
        assert_eq!(report.t_h, 10);
        assert!(report.saturated);
        assert_eq!(report.steps.len(), 11);
        assert_eq!(report.steps[10].divergence, Dyadic::HALF);
        assert_eq!(report.max_bound_before_timescale(), Some(d(1, 2)));

        let report = timescale(nq(6), &bs("01101001")).unwrap();
        assert!(!report.saturated);
        assert!(report.steps.iter().any(|s| s.margin() > Dyadic::ZERO));
        for s in &report.steps {
            assert!(s.divergence <= s.bound);
        }
    }

    #[test]
    fn timescale_generic_tail_is_unsaturated() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.random_range(1..=12);
            let mut bits = random_bits(&mut rng, n + 8).bits().to_vec();
            bits[n + 7] = true;
            let report = timescale(nq(n), &BitString::from_bools(bits).unwrap()).unwrap();
            assert_eq!(report.t_h, n);
            assert!(!report.saturated);
        }
    }

    #[test]
    fn trajectory_cross_checks() {
        let xi = bs("110");
        let rows = compare_trajectory(nq(3), &xi, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].r_exact, d(5, 3));
        assert_eq!(rows[3].r_exact, Dyadic::HALF);
        assert!(rows.iter().all(ExpectationResult::saturated));
        for row in &rows {
            assert!(row.r_exact > Dyadic::ZERO && row.r_exact < Dyadic::ONE);
        }
        assert!(compare_trajectory(nq(3), &xi, 4).is_err());
    }

    #[test]
    fn convergence_scan_examples() {
        let xi = bs("1011");
        let range: Vec<_> = (4..=10).map(nq).collect();
        let scan = convergence_scan(1, &xi, &range).unwrap();
        for (n, div) in &scan {
            assert_eq!(*div, Dyadic::pow2(-(n.get() as i32)));
        }
        let scan0 = convergence_scan(0, &xi, &range).unwrap();
        for (n, div) in &scan0 {
            assert_eq!(*div, n.planck().mul_pow2(-1));
        }
        assert!(convergence_scan(5, &xi, &range).is_err());
        assert!(convergence_scan(5, &xi, &[]).unwrap().is_empty());
    }

    #[test]
    fn convergence_is_monotone_for_zero_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let len = rng.random_range(1..=10);
            let xi = random_bits(&mut rng, len);
            let m = rng.random_range(0..=3);
            let range: Vec<_> = (len.max(m)..=24).map(nq).collect();
            let scan = convergence_scan(m, &xi, &range).unwrap();
            for w in scan.windows(2) {
                assert!(w[1].1 <= w[0].1);
            }
            for (n, div) in &scan {
                assert!(*div <= divergence_bound(*n, m));
            }
            assert!(scan.last().unwrap().1 < d(1, 20));
        }
    }
}
