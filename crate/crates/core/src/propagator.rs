//! The quantum baker's map `T` and its closed-form powers.
//!
//! ```text
//! ⟨ξ|T|η⟩ = (1−i)/2 · i^{|ξ₁ − η_N|} · Π_{k=2}^{N} δ(ξ_k − η_{k−1})
//! ```
//!
//! `T` sends `|η₁…η_N⟩` onto the two labels `|a η₁ … η_{N−1}⟩`, `a ∈ {0,1}`,
//! so every row and every column has exactly two nonzero entries. The
//! `m`-th power, `0 ≤ m ≤ N`, is
//!
//! ```text
//! ⟨ξ|T^m|η⟩ = ((1−i)/2)^m · Π_{k=1}^{N−m} δ(ξ_{m+k} − η_k) · Π_{l=1}^{m} i^{|ξ_l − η_{N−m+l}|}
//! ```
//!
//! which at `m = N` has no Kronecker factors left and pairs `ξ_l` with `η_l`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{root_of_unity, BasisLabel, Operator, QuantumState, QubitCount, MAX_DENSE_QUBITS};

/// `(1 − i)/2`.
pub fn step_factor() -> Complex64 {
    Complex64::new(0.5, -0.5)
}

/// `i^{|a − b|}` for bits `a`, `b`.
fn bit_phase(a: bool, b: bool) -> Complex64 {
    if a == b {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// `((1−i)/2)^m = 2^{−m/2} e^{−iπm/4}`, evaluated without repeated
/// multiplication.
fn step_factor_pow(m: usize) -> Complex64 {
    root_of_unity(-(m as i64), 8) * 2f64.powi(-(m as i32)).sqrt()
}

/// `⟨ξ|T|η⟩`.
pub fn matrix_element(n: QubitCount, xi: BasisLabel, eta: BasisLabel) -> Complex64 {
    debug_assert!(xi.n() == n && eta.n() == n);
    let low_mask = (n.dim() >> 1) - 1;
    if xi.index() & low_mask != eta.index() >> 1 {
        return Complex64::new(0.0, 0.0);
    }
    step_factor() * bit_phase(xi.bit(1), eta.bit(n.get()))
}

/// `⟨ξ|T^m|η⟩` in closed form, `0 ≤ m ≤ N`.
pub fn power_element(n: QubitCount, m: usize, xi: BasisLabel, eta: BasisLabel) -> Result<Complex64> {
    Ok(PowerKernel::new(n, m)?.element(xi, eta))
}

/// The quantum baker's map on `N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Propagator {
    n: QubitCount,
}

impl Propagator {
    pub fn new(n: QubitCount) -> Propagator {
        Propagator { n }
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    /// The two nonzero entries of column `η`: `(row index, ⟨ξ|T|η⟩)`.
    pub fn column(&self, eta: usize) -> [(usize, Complex64); 2] {
        let n = self.n.get();
        let last = eta & 1 == 1;
        let base = eta >> 1;
        [false, true].map(|a| {
            let row = (usize::from(a) << (n - 1)) | base;
            (row, step_factor() * bit_phase(a, last))
        })
    }

    pub fn element(&self, xi: BasisLabel, eta: BasisLabel) -> Complex64 {
        matrix_element(self.n, xi, eta)
    }

    pub fn dense(&self) -> Result<Operator> {
        self.n.require_at_most(MAX_DENSE_QUBITS, "dense propagator")?;
        let n = self.n;
        Ok(Operator::from_fn(n.dim(), |r, c| {
            matrix_element(n, BasisLabel::from_index(n, r).unwrap(), BasisLabel::from_index(n, c).unwrap())
        }))
    }

    /// `T^m` by repeated dense multiplication. Verification only.
    pub fn dense_power(&self, m: usize) -> Result<Operator> {
        let t = self.dense()?;
        let mut acc = Operator::identity(self.n.dim());
        for _ in 0..m {
            acc = t.matmul(&acc);
        }
        Ok(acc)
    }

    fn check_dim(&self, psi: &QuantumState) -> Result<()> {
        if psi.dim() != self.n.dim() {
            return Err(Error::DimensionMismatch { expected: self.n.dim(), found: psi.dim() });
        }
        Ok(())
    }

    /// `Tψ` in `O(D)`: row `ξ` collects from the two `η` with
    /// `η₁…η_{N−1} = ξ₂…ξ_N`.
    pub fn apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        self.check_dim(psi)?;
        let n = self.n.get();
        let d = self.n.dim();
        let low_mask = (d >> 1) - 1;
        let amps = psi.amplitudes();
        let out = (0..d)
            .map(|xi| {
                let first = xi >> (n - 1) == 1;
                let base = (xi & low_mask) << 1;
                step_factor() * (bit_phase(first, false) * amps[base] + bit_phase(first, true) * amps[base | 1])
            })
            .collect();
        Ok(QuantumState::from_unit(psi.n(), out))
    }

    /// `T†ψ`, the exact inverse of [`apply`](Self::apply).
    pub fn inverse_apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        self.check_dim(psi)?;
        let n = self.n.get();
        let d = self.n.dim();
        let amps = psi.amplitudes();
        let conj = step_factor().conj();
        let out = (0..d)
            .map(|eta| {
                let last = eta & 1 == 1;
                let base = eta >> 1;
                let top = base | (1 << (n - 1));
                conj * (bit_phase(false, last).conj() * amps[base] + bit_phase(true, last).conj() * amps[top])
            })
            .collect();
        Ok(QuantumState::from_unit(psi.n(), out))
    }

    /// `T^m ψ` for any `m`, by repeated application.
    pub fn evolve(&self, psi: &QuantumState, m: usize) -> Result<QuantumState> {
        (0..m).try_fold(psi.clone(), |acc, _| self.apply(&acc))
    }

    /// `T^{−m} ψ = (T†)^m ψ`.
    pub fn evolve_back(&self, psi: &QuantumState, m: usize) -> Result<QuantumState> {
        (0..m).try_fold(psi.clone(), |acc, _| self.inverse_apply(&acc))
    }
}

/// Closed-form matrix elements of `T^m` for a fixed `0 ≤ m ≤ N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerKernel {
    n: QubitCount,
    m: usize,
    factor: Complex64,
}

impl PowerKernel {
    /// Only `0 ≤ m ≤ N` has a closed form; longer evolutions go through
    /// [`Propagator::evolve`].
    pub fn new(n: QubitCount, m: usize) -> Result<PowerKernel> {
        if m > n.get() {
            return Err(Error::TimeOutOfRange { m, n: n.get() });
        }
        Ok(PowerKernel { n, m, factor: step_factor_pow(m) })
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Whether `⟨ξ|T^m|η⟩ ≠ 0`: `η_k = ξ_{m+k}` for `k = 1 … N−m`.
    pub fn is_nonzero(&self, xi: usize, eta: usize) -> bool {
        let keep = self.n.get() - self.m;
        let mask = (1usize << keep) - 1;
        xi & mask == eta >> self.m
    }

    pub fn element(&self, xi: BasisLabel, eta: BasisLabel) -> Complex64 {
        debug_assert!(xi.n() == self.n && eta.n() == self.n);
        if !self.is_nonzero(xi.index(), eta.index()) {
            return Complex64::new(0.0, 0.0);
        }
        let (n, m) = (self.n.get(), self.m);
        let flips = (1..=m).filter(|&l| xi.bit(l) != eta.bit(n - m + l)).count();
        self.factor * root_of_unity(flips as i64, 4)
    }

    /// Columns `η` with `⟨ξ|T^m|η⟩ ≠ 0`, in increasing order; always `2^m`
    /// of them.
    pub fn row_support(&self, xi: usize) -> impl Iterator<Item = usize> {
        let keep = self.n.get() - self.m;
        let high = (xi & ((1usize << keep) - 1)) << self.m;
        (0..1usize << self.m).map(move |low| high | low)
    }

    pub fn dense(&self) -> Result<Operator> {
        self.n.require_at_most(MAX_DENSE_QUBITS, "dense propagator power")?;
        let n = self.n;
        Ok(Operator::from_fn(n.dim(), |r, c| {
            self.element(BasisLabel::from_index(n, r).unwrap(), BasisLabel::from_index(n, c).unwrap())
        }))
    }
}
