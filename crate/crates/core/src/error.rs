//! Error type shared by all engines.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("input contains a non-finite entry ({context})")]
    NonFinite { context: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("dense operations are limited to dim <= {max}, got {dim}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("qubit count {n} outside supported range [{min}, {max}]")]
    QubitCountOutOfRange { n: u32, min: u32, max: u32 },

    #[error("marked index {marked} out of range for {n} qubits")]
    MarkedOutOfRange { marked: usize, n: u32 },

    #[error("state norm {norm} differs from 1 beyond tolerance")]
    NotNormalized { norm: f64 },

    #[error("parameter {name}={value} outside valid range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("step count computes to 0 for N={n_states}, epsilon={epsilon:?}")]
    EmptyPlan { n_states: f64, epsilon: Option<f64> },

    #[error("state leaves span{{|s>,|m>}}: residual norm {residual:.3e}")]
    SubspaceViolation { residual: f64 },

    #[error("integrator failed to converge after {refinements} refinements (last step-doubling change {last_change:.3e}, target {target:.3e})")]
    ConvergenceFailure {
        refinements: u32,
        last_change: f64,
        target: f64,
    },

    #[error("engine capacity exceeded: {engine} supports at most {max} qubits, plan needs {requested}; use the two-level engine instead")]
    EngineCapacity {
        engine: &'static str,
        max: u32,
        requested: u32,
    },

    #[error("unknown gate tag `{tag}`")]
    UnknownGate { tag: String },

    #[error("invalid {what}: {detail}")]
    InvalidInput { what: &'static str, detail: String },
}
