//! Operators on periodic 3D grids: scalar operators, split-octonion
//! coefficient operators, the supercharges, and the identity checks.

mod identities;
mod oct;
mod scalar;
mod susy;

pub use identities::{
    check_all, check_identity, check_identity_with, check_protocol, heisenberg_rhs, probe_fields, Bound, Charge,
    CheckConfig, FactorFit, GridSummary, HeisenbergReport, HeisenbergResult, IdentityId, IdentityReport, ProbeMode,
    APPROXIMATE_TOLERANCE, FACTOR_TOLERANCE, HEISENBERG_TOLERANCE, NONVANISHING_BOUND,
};
pub use oct::{octop_apply, octop_apply_right, octop_commutator, octop_mul, product_pieces, Grouping, OctField, OctOperator};
pub use scalar::{momentum_op, ScalarOperator, Scheme};
pub use susy::{build_q, build_qbar, coefficient_fields, hamiltonian, CoefficientFields, Hamiltonian, Supercharges};
