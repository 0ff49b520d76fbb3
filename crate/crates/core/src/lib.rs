//! Split-octonion algebra and an octonion-valued generalization of
//! supersymmetric quantum mechanics, discretized on periodic grids.
//!
//! The crate is organized bottom-up:
//!
//! * [`algebra`]: octonions in the real and split bases, Zorn vector matrices,
//!   the multiplication tables and the identity checks built on them.
//! * [`expr`]: superpotential expressions with symbolic differentiation, and
//!   octonion expressions whose parenthesization is preserved.
//! * [`grid`], [`operator`]: periodic grids, scalar operators (momentum,
//!   multiplication, composition) and octonion-coefficient operators such as
//!   the supercharges and the Hamiltonian.
//! * [`observability`]: the representable wavefunction subspace and the
//!   observable/unobservable classification.
//! * [`susy1d`]: the classic 2x2 one-dimensional construction.
//! * [`spectral`]: eigenvalue problems for the partner Hamiltonians.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod grid;
pub mod observability;
pub mod operator;
pub mod random;
pub mod spectral;
pub mod susy1d;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Coefficient field of every algebra value and every grid function.
pub type Scalar = num_complex::Complex64;

/// Default seed used by every randomized check unless overridden.
pub const DEFAULT_SEED: u64 = 0xD5EED;
