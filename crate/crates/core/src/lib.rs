//! Exact simulation laboratory for quantum search on an unstructured database
//! with a single marked item.
//!
//! Three realizations of the search are supported, all built from the two
//! projector-complement Hamiltonians `H_f = I - |m><m|` and `H_0 = I - |s><s|`
//! (`|s>` the uniform superposition, `|m>` the marked basis state):
//!
//! * discrete Grover iterations `G = -U_0 U_f`,
//! * continuous evolution under the time-independent `H_0 + H_f`, split into
//!   Trotter steps `e^{-i H_0 dt} e^{-i H_f dt}`,
//! * adiabatic evolution under `H(s) = (1-s) H_0 + s H_f` with the mixing
//!   parameter swept by a gap-adapted ("local") schedule and discretized into
//!   a staircase of constant Hamiltonians.
//!
//! Three engines execute the same step plans and cross-validate each other:
//! a full 2^n statevector engine exploiting the rank-one structure of both
//! Hamiltonians ([`statevector`]), a gate-level engine that realizes each
//! `e^{-i H_f t}` with an ancilla qubit and two oracle queries ([`gates`]),
//! and an exact two-dimensional model of the invariant subspace
//! span{`|s>`, `|m>`} that scales to arbitrary database sizes ([`twolevel`]).
//! [`schedule`] and [`plan`] hold the evolution schedules and per-step
//! duration tables, [`run`] executes plans on any engine, and [`probe`]
//! measures splitting and discretization errors against dense brute force.

pub mod checks;
pub mod dense;
pub mod error;
pub mod gates;
pub mod plan;
pub mod probe;
pub mod run;
pub mod schedule;
pub mod statevector;
pub mod textfmt;
pub mod tolerance;
pub mod twolevel;

/// Double-precision complex scalar used for all amplitudes and phases.
pub type C64 = num_complex::Complex64;

pub use dense::{hermitian_expm, operator_norm, unitary_distance, DenseOperator};
pub use error::{Error, Result};
pub use gates::{AncillaState, Gate, GateSequence};
pub use plan::{build_plan, build_plan_with_steps, predicted_angle, Algorithm, PlanStep, StepPlan};
pub use run::{execute_plan, EngineKind, RunOptions, RunReport, StepRecord};
pub use schedule::LocalAdiabaticSchedule;
pub use statevector::{OracleCounter, OracleSpec, PureState};
pub use twolevel::{SpectralPoint, StepControl, TwoLevelState};
