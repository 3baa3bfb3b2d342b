//! Gate-level engine: search-register + one ancilla qubit.
//!
//! The marked-state evolution e^{-i H_f t} is not applied as a rank-one
//! update here; it is compiled to the circuit
//!
//! ```text
//!   ORACLE  ->  APHASE(t)  ->  ORACLE
//! ```
//!
//! where `ORACLE` is the reversible bit-flip oracle |x>|y> -> |x>|y + f(x)>
//! and `APHASE(t)` multiplies ancilla-|0> components by e^{-it}. Two oracle
//! queries per evolution, and the ancilla returns to |0> exactly. The mixing
//! evolution e^{-i H_0 t} needs no oracle: it is Hadamard-conjugated phasing
//! of the all-zeros register component, with the accompanying global phase
//! kept explicit so amplitude-level equivalence with the rank-one engine can
//! be asserted exactly.
//!
//! The five gate tags below are the whole instruction set; decomposition to
//! one- and two-qubit native gates is out of scope.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::statevector::{OracleCounter, OracleSpec, PureState};
use crate::tolerance;
use crate::C64;

/// Gate alphabet. Times are radians of accumulated phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// |x>|y> -> |x>|y + f(x) mod 2>; costs one oracle query.
    OracleBitflip,
    /// e^{-it}|0><0| + |1><1| on the ancilla.
    AncillaPhase(f64),
    /// Hadamard on every register qubit (ancilla untouched).
    HadamardAll,
    /// Multiplies the all-zeros register component by e^{+it}.
    ZeroPhase(f64),
    /// Multiplies every amplitude by e^{-it}.
    GlobalPhase(f64),
}

/// Ordered list of gates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateSequence {
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn oracle_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::OracleBitflip))
            .count()
    }

    pub fn extend(&mut self, other: &GateSequence) {
        self.gates.extend_from_slice(&other.gates);
    }
}

/// Circuit for e^{-i H_f t}: exactly two oracle queries.
pub fn compile_marked_evolution(t: f64) -> GateSequence {
    GateSequence::new(vec![
        Gate::OracleBitflip,
        Gate::AncillaPhase(t),
        Gate::OracleBitflip,
    ])
}

/// Circuit for e^{-i H_0 t}: oracle-free.
pub fn compile_mixing_evolution(t: f64) -> GateSequence {
    GateSequence::new(vec![
        Gate::HadamardAll,
        Gate::ZeroPhase(t),
        Gate::GlobalPhase(t),
        Gate::HadamardAll,
    ])
}

/// n-qubit search register tensored with one ancilla qubit (the top bit of
/// the amplitude index). The ancilla starts in |0> and every compiled
/// primitive returns it there.
#[derive(Debug, Clone)]
pub struct AncillaState {
    n_qubits: u32,
    amplitudes: Vec<C64>,
}

impl AncillaState {
    /// Tensors a register state with an ancilla prepared in |0>.
    pub fn from_register(register: &PureState) -> Self {
        let dim = register.n_states();
        let mut amplitudes = vec![C64::new(0.0, 0.0); 2 * dim];
        amplitudes[..dim].copy_from_slice(register.amplitudes());
        Self {
            n_qubits: register.n_qubits(),
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    fn register_dim(&self) -> usize {
        self.amplitudes.len() / 2
    }

    /// Total weight currently on ancilla |1>.
    pub fn ancilla_one_weight(&self) -> f64 {
        self.amplitudes[self.register_dim()..]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Discards the ancilla, requiring it to be in |0> within tolerance.
    pub fn into_register(self) -> Result<PureState> {
        let leak = self.ancilla_one_weight();
        if leak.sqrt() > tolerance::NORM_DRIFT {
            return Err(Error::InvalidInput {
                what: "ancilla discard",
                detail: format!("ancilla-|1> weight {leak:.3e} at circuit end"),
            });
        }
        let dim = self.register_dim();
        PureState::from_amplitudes(self.n_qubits, self.amplitudes[..dim].to_vec())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Amplitude of |x> with ancilla |0>.
    pub fn register_amplitude(&self, x: usize) -> C64 {
        self.amplitudes[x]
    }

    pub fn apply_oracle_bitflip(&mut self, oracle: &OracleSpec, counter: &mut OracleCounter) -> Result<()> {
        if oracle.n_qubits() != self.n_qubits {
            return Err(Error::DimMismatch {
                left: self.register_dim(),
                right: oracle.n_states(),
            });
        }
        let m = oracle.marked();
        let dim = self.register_dim();
        self.amplitudes.swap(m, dim + m);
        counter.record(1);
        Ok(())
    }

    pub fn apply_ancilla_phase(&mut self, t: f64) {
        let phase = (-C64::i() * t).exp();
        let dim = self.register_dim();
        for a in &mut self.amplitudes[..dim] {
            *a *= phase;
        }
    }

    pub fn apply_hadamard_all(&mut self) {
        let dim = self.register_dim();
        hadamard_all_in_place(&mut self.amplitudes[..dim], self.n_qubits);
        let (_, upper) = self.amplitudes.split_at_mut(dim);
        hadamard_all_in_place(upper, self.n_qubits);
    }

    pub fn apply_zero_phase(&mut self, t: f64) {
        let phase = (C64::i() * t).exp();
        let dim = self.register_dim();
        self.amplitudes[0] *= phase;
        self.amplitudes[dim] *= phase;
    }

    pub fn apply_global_phase(&mut self, t: f64) {
        let phase = (-C64::i() * t).exp();
        for a in &mut self.amplitudes {
            *a *= phase;
        }
    }
}

fn hadamard_all_in_place(amps: &mut [C64], n_qubits: u32) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for q in 0..n_qubits {
        let stride = 1usize << q;
        let mut base = 0;
        while base < amps.len() {
            for i in base..base + stride {
                let lo = amps[i];
                let hi = amps[i + stride];
                amps[i] = (lo + hi) * r;
                amps[i + stride] = (lo - hi) * r;
            }
            base += 2 * stride;
        }
    }
}

/// Runs a sequence on an ancilla-extended state, counting oracle queries.
pub fn execute(
    state: &mut AncillaState,
    sequence: &GateSequence,
    oracle: &OracleSpec,
    counter: &mut OracleCounter,
) -> Result<()> {
    for gate in sequence.gates() {
        match *gate {
            Gate::OracleBitflip => state.apply_oracle_bitflip(oracle, counter)?,
            Gate::AncillaPhase(t) => state.apply_ancilla_phase(t),
            Gate::HadamardAll => state.apply_hadamard_all(),
            Gate::ZeroPhase(t) => state.apply_zero_phase(t),
            Gate::GlobalPhase(t) => state.apply_global_phase(t),
        }
    }
    Ok(())
}

/// Runs a sequence on a bare register state: attaches an ancilla in |0>,
/// executes, and discards it (which fails if the circuit left it entangled).
pub fn execute_register(
    register: &mut PureState,
    sequence: &GateSequence,
    oracle: &OracleSpec,
    counter: &mut OracleCounter,
) -> Result<()> {
    let mut extended = AncillaState::from_register(register);
    execute(&mut extended, sequence, oracle, counter)?;
    *register = extended.into_register()?;
    Ok(())
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::OracleBitflip => write!(f, "ORACLE"),
            Gate::AncillaPhase(t) => write!(f, "APHASE {t:.16e}"),
            Gate::HadamardAll => write!(f, "HALL"),
            Gate::ZeroPhase(t) => write!(f, "ZPHASE {t:.16e}"),
            Gate::GlobalPhase(t) => write!(f, "GPHASE {t:.16e}"),
        }
    }
}

impl fmt::Display for GateSequence {
    /// One gate per line, times as 17-significant-digit decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or("");
        let parse_t = |parts: &mut std::str::SplitWhitespace<'_>| -> Result<f64> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidInput {
                    what: "gate time",
                    detail: format!("missing or malformed time in `{line}`"),
                })
        };
        match tag {
            "ORACLE" => Ok(Gate::OracleBitflip),
            "APHASE" => Ok(Gate::AncillaPhase(parse_t(&mut parts)?)),
            "HALL" => Ok(Gate::HadamardAll),
            "ZPHASE" => Ok(Gate::ZeroPhase(parse_t(&mut parts)?)),
            "GPHASE" => Ok(Gate::GlobalPhase(parse_t(&mut parts)?)),
            other => Err(Error::UnknownGate { tag: other.into() }),
        }
    }
}

impl FromStr for GateSequence {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let gates = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(Gate::from_str)
            .collect::<Result<Vec<_>>>()?;
        Ok(GateSequence::new(gates))
    }
}
