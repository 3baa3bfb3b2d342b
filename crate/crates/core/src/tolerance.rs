//! Numeric tolerances used across the crate.
//!
//! Two precision classes cover almost everything: algebraic identities
//! evaluated in closed form on 2x2 blocks stay at machine precision and get
//! `EXACT_ALGEBRA`; anything routed through a dense eigendecomposition or
//! singular-value path accumulates O(dim^3) rounding and gets `DENSE_LINALG`.

/// Closed-form identities on dim <= 2 (angles, eigenvalues, round trips).
pub const EXACT_ALGEBRA: f64 = 1e-12;

/// Dense eigen/SVD paths and rank-one-vs-dense comparisons.
pub const DENSE_LINALG: f64 = 1e-10;

/// State-norm drift allowed after any sequence of evolution steps.
pub const NORM_DRIFT: f64 = 1e-10;

/// Norm slack accepted on inputs that are required to be normalized.
pub const INPUT_NORM: f64 = 1e-8;

/// Residual above which a statevector is rejected as outside span{|s>,|m>}.
pub const SUBSPACE_RESIDUAL: f64 = 1e-8;

/// Step-doubling convergence target for the reference integrator.
pub const ODE_CONVERGENCE: f64 = 1e-8;

/// Largest dimension accepted on dense paths (n = 12 qubits).
pub const MAX_DENSE_DIM: usize = 4096;

/// Largest qubit count accepted by the statevector engine.
pub const MAX_QUBITS: u32 = 24;
