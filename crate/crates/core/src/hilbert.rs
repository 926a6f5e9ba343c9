//! N-qubit Hilbert space of the quantized unit square.
//!
//! Basis kets `|ξ₁ξ₂…ξ_N⟩` are stored at index `j = Σ_k ξ_k 2^{N-k}` (the
//! first label bit is the most significant), and `|j⟩` is the unit vector
//! with a one in slot `j`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::symbolic::BitString;

/// Largest qubit count accepted anywhere. Closed-form (exact) paths work up
/// to here; vector and matrix paths have their own, lower caps.
pub const MAX_QUBITS: usize = 48;

/// Largest qubit count for which state vectors are allocated.
pub const MAX_STATE_QUBITS: usize = 24;

/// Largest qubit count for dense `D × D` operators (D = 4096, about 268 MB).
pub const MAX_DENSE_QUBITS: usize = 12;

/// Tolerance used by the unitarity and hermiticity predicates.
pub const OPERATOR_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitCount(usize);

impl QubitCount {
    pub fn new(n: usize) -> Result<QubitCount> {
        if (1..=MAX_QUBITS).contains(&n) {
            Ok(QubitCount(n))
        } else {
            Err(Error::InvalidQubitCount(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `D = 2^N`.
    pub fn dim(self) -> usize {
        1usize << self.0
    }

    /// `h = 1/D = 2^{-N}`.
    pub fn planck(self) -> Dyadic {
        Dyadic::pow2(-(self.0 as i32))
    }

    /// Errors unless `N` is within `max` for the named path.
    pub fn require_at_most(self, max: usize, what: &'static str) -> Result<()> {
        if self.0 > max {
            return Err(Error::Capacity { what, requested: self.0, max });
        }
        Ok(())
    }
}

impl fmt::Display for QubitCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Label `|j₁ j₂ … j_N⟩` of a computational basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    n: QubitCount,
    index: usize,
}

impl BasisLabel {
    pub fn from_index(n: QubitCount, index: usize) -> Result<BasisLabel> {
        if index >= n.dim() {
            return Err(Error::DimensionMismatch { expected: n.dim(), found: index });
        }
        Ok(BasisLabel { n, index })
    }

    /// Uses exactly the stored bits; the string must have length `N`.
    pub fn from_bits(n: QubitCount, bits: &BitString) -> Result<BasisLabel> {
        if bits.len() != n.get() {
            return Err(Error::LabelLength { expected: n.get(), found: bits.len() });
        }
        Ok(BasisLabel::from_prefix(n, bits))
    }

    /// Label built from `ξ₁ … ξ_N` of a possibly longer (or shorter,
    /// zero-tailed) string.
    pub fn from_prefix(n: QubitCount, bits: &BitString) -> BasisLabel {
        let index = (1..=n.get()).fold(0usize, |acc, k| (acc << 1) | usize::from(bits.bit(k)));
        BasisLabel { n, index }
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `j_k`, 1-based, most significant first.
    pub fn bit(&self, k: usize) -> bool {
        debug_assert!((1..=self.n.get()).contains(&k));
        (self.index >> (self.n.get() - k)) & 1 == 1
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_bools((1..=self.n.get()).map(|k| self.bit(k)).collect())
            .expect("label length is within MAX_BITS")
    }

    pub fn all(n: QubitCount) -> impl Iterator<Item = BasisLabel> {
        (0..n.dim()).map(move |index| BasisLabel { n, index })
    }
}

/// `e^{2πi k / order}`, with `k` reduced modulo `order` first. Multiples of a
/// quarter turn come out exact.
pub fn root_of_unity(k: i64, order: u64) -> Complex64 {
    let order_i = order as i128;
    let k = (k as i128).rem_euclid(order_i);
    if (4 * k) % order_i == 0 {
        return match 4 * k / order_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let angle = 2.0 * PI * (k as f64) / (order as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// A unit vector of amplitudes indexed by basis label.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n: QubitCount,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Normalizes `amplitudes`; rejects a zero vector or the wrong length.
    pub fn new(n: QubitCount, amplitudes: Vec<Complex64>) -> Result<QuantumState> {
        n.require_at_most(MAX_STATE_QUBITS, "state vector")?;
        if amplitudes.len() != n.dim() {
            return Err(Error::DimensionMismatch { expected: n.dim(), found: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(QuantumState { n, amplitudes })
    }

    pub fn basis(label: BasisLabel) -> Result<QuantumState> {
        let n = label.n();
        n.require_at_most(MAX_STATE_QUBITS, "state vector")?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n.dim()];
        amplitudes[label.index()] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n, amplitudes })
    }

    /// Crate-internal constructor for vectors known to be unit length (images
    /// of unit vectors under unitaries).
    pub(crate) fn from_unit(n: QubitCount, amplitudes: Vec<Complex64>) -> QuantumState {
        debug_assert_eq!(amplitudes.len(), n.dim());
        QuantumState { n, amplitudes }
    }

    pub fn n(&self) -> QubitCount {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|q̂|ψ⟩ = Σ_j q_j |ψ_j|²`.
    pub fn position_expectation(&self) -> f64 {
        let d = self.dim() as f64;
        self.amplitudes.iter().enumerate().map(|(j, a)| (j as f64 + 0.5) / d * a.norm_sqr()).sum()
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Dense complex `D × D` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    /// Builds the matrix row by row in parallel.
    pub fn from_fn<F>(dim: usize, f: F) -> Operator
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        entries.par_chunks_mut(dim.max(1)).enumerate().for_each(|(r, row)| {
            for (c, e) in row.iter_mut().enumerate() {
                *e = f(r, c);
            }
        });
        Operator { dim, entries }
    }

    pub fn identity(dim: usize) -> Operator {
        Operator::from_diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Operator {
        let dim = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Operator { dim, entries }
    }

    /// Matrix whose `(r, c)` entry depends only on `(c − r) mod dim`.
    pub fn circulant(first_row: &[Complex64]) -> Operator {
        let dim = first_row.len();
        Operator::from_fn(dim, |r, c| first_row[(c + dim - r) % dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: Complex64) -> Operator {
        Operator { dim: self.dim, entries: self.entries.iter().map(|&e| e * s).collect() }
    }

    /// Dense product `self · rhs`.
    pub fn matmul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        entries.par_chunks_mut(dim.max(1)).enumerate().for_each(|(r, out)| {
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        });
        Operator { dim, entries }
    }

    pub fn apply(&self, psi: &QuantumState) -> Result<QuantumState> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: psi.dim() });
        }
        let amplitudes = (0..self.dim)
            .into_par_iter()
            .map(|r| self.row(r).iter().zip(psi.amplitudes()).map(|(a, b)| a * b).sum())
            .collect();
        // Not renormalized: callers may apply non-unitary operators.
        Ok(QuantumState { n: psi.n(), amplitudes })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries.par_iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).reduce(|| 0.0, f64::max)
    }

    /// `max |A†A − I|`.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Operator::identity(self.dim))
    }

    /// `max |A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }
}

/// `q_j = (j + 1/2)/2^N`, exact.
pub fn position_eigenvalue(n: QubitCount, j: usize) -> Dyadic {
    Dyadic::new(2 * j as i128 + 1, n.get() as u32 + 1)
}

/// `q̂ = Σ_j q_j |j⟩⟨j|`.
pub fn position_operator(n: QubitCount) -> Result<Operator> {
    n.require_at_most(MAX_DENSE_QUBITS, "dense operator")?;
    let diag: Vec<_> = (0..n.dim()).map(|j| Complex64::new(position_eigenvalue(n, j).to_f64(), 0.0)).collect();
    Ok(Operator::from_diagonal(&diag))
}

/// Quantum Fourier transform, `⟨ξ|F|j⟩ = e^{2πi ξ j / D}/√D`.
pub fn qft(n: QubitCount) -> Result<Operator> {
    n.require_at_most(MAX_DENSE_QUBITS, "dense operator")?;
    let d = n.dim();
    let roots: Vec<_> = (0..d).map(|k| root_of_unity(k as i64, d as u64)).collect();
    let scale = 1.0 / (d as f64).sqrt();
    Ok(Operator::from_fn(d, |xi, j| roots[(xi * j) & (d - 1)] * scale))
}

/// `F† diag(values) F`, assembled as a circulant in `O(D²)`.
///
/// `(F† Λ F)_{ab} = (1/D) Σ_j λ_j e^{2πi j (b − a)/D}`, which depends on
/// `(b − a) mod D` only.
fn conjugate_diagonal_by_qft(values: &[Complex64]) -> Operator {
    let d = values.len();
    let roots: Vec<_> = (0..d).map(|k| root_of_unity(k as i64, d as u64)).collect();
    let first_row: Vec<Complex64> = (0..d)
        .into_par_iter()
        .map(|k| values.iter().enumerate().map(|(j, &v)| v * roots[(j * k) & (d - 1)]).sum::<Complex64>() / d as f64)
        .collect();
    Operator::circulant(&first_row)
}

/// Momentum operator `p̂ = F† q̂ F`.
///
/// Conjugating with `F†` on the left (rather than `F`) is the orientation
/// for which `e^{2πi q̂} e^{2πi p̂} = ε e^{2πi p̂} e^{2πi q̂}` with
/// `ε = e^{2πi/D}`; the other orientation yields the conjugate phase.
/// Hermiticity and the spectrum are the same either way.
pub fn momentum_operator(n: QubitCount) -> Result<Operator> {
    n.require_at_most(MAX_DENSE_QUBITS, "dense operator")?;
    let diag: Vec<_> = (0..n.dim()).map(|j| Complex64::new(position_eigenvalue(n, j).to_f64(), 0.0)).collect();
    Ok(conjugate_diagonal_by_qft(&diag))
}

/// Weyl displacement operators `(Û, V̂) = (e^{2πi q̂}, e^{2πi p̂})`.
///
/// `Û` is diagonal with `e^{2πi q_j} = e^{2πi (2j+1)/(2D)}`; `V̂ = F† Û F`.
pub fn weyl_operators(n: QubitCount) -> Result<(Operator, Operator)> {
    n.require_at_most(MAX_DENSE_QUBITS, "dense operator")?;
    let d = n.dim();
    let diag: Vec<_> = (0..d).map(|j| root_of_unity(2 * j as i64 + 1, 2 * d as u64)).collect();
    Ok((Operator::from_diagonal(&diag), conjugate_diagonal_by_qft(&diag)))
}

/// `ε = e^{2πi/D}`.
pub fn commutation_phase(n: QubitCount) -> Complex64 {
    root_of_unity(1, n.dim() as u64)
}
