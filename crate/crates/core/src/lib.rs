//! Classical and quantum baker's map.
//!
//! The classical map is simulated exactly through its Bernoulli-shift
//! representation ([`symbolic`]). The quantum map `T` acts on `N` qubits
//! ([`hilbert`], [`propagator`]), and [`correspondence`] compares the quantum
//! position mean with the classical trajectory: closed form against brute
//! force, the divergence bound `h·2^{m−1}`, its saturation by zero-tail
//! strings and the logarithmic timescale `t_h = log₂(1/h)`.
//! [`experiments`] drives all of this from the `qbaker` command line tool.
//!
//! ```
//! use qbaker::{correspondence, BasisLabel, BitString, Dyadic, QubitCount};
//!
//! let n = QubitCount::new(3).unwrap();
//! let xi: BitString = "110".parse().unwrap();
//! let r1 = correspondence::expectation_closed_form(n, BasisLabel::from_prefix(n, &xi), 1).unwrap();
//! assert_eq!(r1, Dyadic::new(5, 3));
//! ```

pub mod correspondence;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod propagator;
pub mod symbolic;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use hilbert::{BasisLabel, Operator, QuantumState, QubitCount};
pub use propagator::{PowerKernel, Propagator};
pub use symbolic::{BitString, PhasePoint, TwoSidedString};
