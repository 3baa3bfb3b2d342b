//! Executes a step plan on one of the three engines and records the
//! trajectory.
//!
//! Canonical step order: the H_f factor is applied before the H_0 factor,
//! matching the operator product `e^{-i H_0 dt0} e^{-i H_f dtf}` read right
//! to left (and `G = -U_0 U_f`). Swapping the factors only changes results
//! at the squared-step-size level, but the order is fixed for
//! reproducibility.
//!
//! Reported quantities per step:
//!
//! * `t` - cumulative schedule time j * step_time (grover: cumulative
//!   applied duration 2 pi j),
//! * `alpha_pred` - the closed-form angle for the plan,
//! * `alpha_meas` - the rotation angle accumulated away from the initial
//!   uniform state, arccos |<psi_0|psi_j>|; global-phase invariant and zero
//!   at j = 0,
//! * the complex overlap <m|psi_j>, the success probability |<m|psi_j>|^2,
//!   the phase distance to |m>, and the cumulative oracle-query count.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gates::{self, AncillaState};
use crate::plan::{predicted_angle, Algorithm, StepPlan};
use crate::statevector::{OracleCounter, OracleSpec, PureState};
use crate::textfmt::float17;
use crate::twolevel::TwoLevelState;
use crate::C64;

/// Which simulation backend executes the plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// Full 2^n amplitudes, rank-one updates.
    Statevector,
    /// Register + ancilla, compiled gate sequences.
    Gates,
    /// Exact coordinates in span{|s>, |m>}; any N.
    TwoLevel,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Statevector => "statevector",
            EngineKind::Gates => "gates",
            EngineKind::TwoLevel => "twolevel",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(EngineKind::Statevector),
            "gates" => Ok(EngineKind::Gates),
            "twolevel" => Ok(EngineKind::TwoLevel),
            other => Err(Error::InvalidInput {
                what: "engine",
                detail: format!("`{other}` (expected statevector|gates|twolevel)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Record every step (true) or only the initial and final rows.
    pub record_trajectory: bool,
    /// Return the final register state (the two-level engine lifts its
    /// coordinates through the oracle, which must then be present).
    pub capture_final_state: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_trajectory: true,
            capture_final_state: false,
        }
    }
}

/// One recorded row.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub j: usize,
    pub t: f64,
    pub s: Option<f64>,
    pub alpha_pred: f64,
    pub alpha_meas: f64,
    pub overlap_marked: C64,
    pub succ_prob: f64,
    pub dist_to_marked: f64,
    pub oracle_calls: u64,
}

/// Trajectory plus summary of one plan execution.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub engine: EngineKind,
    pub n_states: f64,
    pub epsilon: Option<f64>,
    pub records: Vec<StepRecord>,
    pub final_dist: f64,
    pub final_succ_prob: f64,
    pub total_oracle_calls: u64,
    pub wall_seconds: f64,
    /// Present when requested via [`RunOptions::capture_final_state`].
    pub final_state: Option<PureState>,
}

impl RunReport {
    pub fn final_record(&self) -> &StepRecord {
        self.records.last().expect("report always has the j=0 row")
    }

    /// CSV with `# key=value` header comments followed by the trajectory.
    pub fn to_csv(&self, header: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("j,t,s,alpha_pred,alpha_meas,re_overlap,im_overlap,succ_prob,dist,oracle_calls\n");
        for r in &self.records {
            let s = r.s.map(float17).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.j,
                float17(r.t),
                s,
                float17(r.alpha_pred),
                float17(r.alpha_meas),
                float17(r.overlap_marked.re),
                float17(r.overlap_marked.im),
                float17(r.succ_prob),
                float17(r.dist_to_marked),
                r.oracle_calls
            );
        }
        out
    }
}

/// Rotation angle away from the start state, from the overlap magnitude.
fn angle_from_start_overlap(overlap_magnitude: f64) -> f64 {
    overlap_magnitude.clamp(-1.0, 1.0).acos()
}

fn distance_from_overlap(overlap_magnitude: f64) -> f64 {
    (2.0 - 2.0 * overlap_magnitude.min(1.0)).max(0.0).sqrt()
}

trait StepEngine {
    /// Applies step j (1-based) of the plan.
    fn apply_step(&mut self, plan: &StepPlan, j: usize, counter: &mut OracleCounter) -> Result<()>;
    /// (<m|psi>, <psi_0|psi>) for the current state.
    fn overlaps(&self) -> (C64, C64);
    /// The current register state as full amplitudes.
    fn register_state(&self, oracle: Option<&OracleSpec>) -> Result<PureState>;
}

struct StatevectorEngine {
    state: PureState,
    oracle: OracleSpec,
}

impl StepEngine for StatevectorEngine {
    fn apply_step(&mut self, plan: &StepPlan, j: usize, counter: &mut OracleCounter) -> Result<()> {
        let step = plan.steps()[j - 1];
        match plan.algorithm() {
            Algorithm::Grover => self.state.grover_iteration(&self.oracle, counter),
            _ => {
                self.state
                    .evolve_marked_hamiltonian(&self.oracle, step.dtf, counter)?;
                self.state.evolve_mixing_hamiltonian(step.dt0)
            }
        }
    }

    fn overlaps(&self) -> (C64, C64) {
        let m = self.state.amplitudes()[self.oracle.marked()];
        (m, self.state.start_overlap())
    }

    fn register_state(&self, _oracle: Option<&OracleSpec>) -> Result<PureState> {
        Ok(self.state.clone())
    }
}

struct GatesEngine {
    state: AncillaState,
    oracle: OracleSpec,
}

impl StepEngine for GatesEngine {
    fn apply_step(&mut self, plan: &StepPlan, j: usize, counter: &mut OracleCounter) -> Result<()> {
        // every algorithm is realized as the same two-factor step here; for
        // grover this is e^{-i H_0 pi} e^{-i H_f pi} = G up to a global sign
        let step = plan.steps()[j - 1];
        let mut seq = gates::compile_marked_evolution(step.dtf);
        seq.extend(&gates::compile_mixing_evolution(step.dt0));
        gates::execute(&mut self.state, &seq, &self.oracle, counter)
    }

    fn overlaps(&self) -> (C64, C64) {
        let dim = 1usize << self.state.n_qubits();
        let m = self.state.register_amplitude(self.oracle.marked());
        let mut sum = C64::new(0.0, 0.0);
        for x in 0..dim {
            sum += self.state.register_amplitude(x);
        }
        (m, sum / C64::new((dim as f64).sqrt(), 0.0))
    }

    fn register_state(&self, _oracle: Option<&OracleSpec>) -> Result<PureState> {
        self.state.clone().into_register()
    }
}

struct TwoLevelEngine {
    state: TwoLevelState,
}

impl StepEngine for TwoLevelEngine {
    fn apply_step(&mut self, plan: &StepPlan, j: usize, counter: &mut OracleCounter) -> Result<()> {
        let step = plan.steps()[j - 1];
        match plan.algorithm() {
            Algorithm::Grover => {
                self.state.grover_step();
                counter.record(1);
            }
            _ => {
                self.state.evolve_marked(step.dtf);
                self.state.evolve_mixing(step.dt0);
                counter.record(2);
            }
        }
        Ok(())
    }

    fn overlaps(&self) -> (C64, C64) {
        (self.state.marked_overlap(), self.state.start_overlap())
    }

    fn register_state(&self, oracle: Option<&OracleSpec>) -> Result<PureState> {
        let oracle = oracle.ok_or(Error::InvalidInput {
            what: "final-state capture",
            detail: "the two-level engine needs an oracle to lift its coordinates".into(),
        })?;
        crate::twolevel::embed(&self.state, oracle)
    }
}

/// Runs `plan` on `engine` starting from the uniform state, recording one
/// row per step (j = 0 is the initial state). The statevector and gate
/// engines need an oracle; the two-level engine only uses the plan's N.
pub fn execute_plan(
    plan: &StepPlan,
    engine: EngineKind,
    oracle: Option<&OracleSpec>,
    options: RunOptions,
) -> Result<RunReport> {
    let started = Instant::now();

    let mut backend: Box<dyn StepEngine> = match engine {
        EngineKind::Statevector | EngineKind::Gates => {
            let oracle = *oracle.ok_or(Error::InvalidInput {
                what: "oracle",
                detail: format!("the {} engine requires a marked index", engine.name()),
            })?;
            let n = plan.n_qubits().ok_or(Error::InvalidInput {
                what: "plan",
                detail: "this plan was built for a non-power-of-two size; only the two-level engine can run it".into(),
            })?;
            if oracle.n_qubits() != n {
                return Err(Error::DimMismatch {
                    left: 1usize << n,
                    right: oracle.n_states(),
                });
            }
            if n > crate::tolerance::MAX_QUBITS {
                return Err(Error::EngineCapacity {
                    engine: engine.name(),
                    max: crate::tolerance::MAX_QUBITS,
                    requested: n,
                });
            }
            let register = PureState::uniform(n)?;
            match engine {
                EngineKind::Statevector => Box::new(StatevectorEngine {
                    state: register,
                    oracle,
                }),
                _ => Box::new(GatesEngine {
                    state: AncillaState::from_register(&register),
                    oracle,
                }),
            }
        }
        EngineKind::TwoLevel => Box::new(TwoLevelEngine {
            state: TwoLevelState::uniform_start(plan.n_states())?,
        }),
    };

    let mut counter = OracleCounter::new();
    let r = plan.step_count();
    let mut records = Vec::with_capacity(if options.record_trajectory { r + 1 } else { 2 });

    let record = |records: &mut Vec<StepRecord>,
                  backend: &dyn StepEngine,
                  j: usize,
                  counter: &OracleCounter|
     -> Result<()> {
        let (overlap_m, overlap_start) = backend.overlaps();
        records.push(StepRecord {
            j,
            t: j as f64 * plan.step_time(),
            s: if j == 0 {
                plan.steps()[0].s.map(|_| 0.0)
            } else {
                plan.steps()[j - 1].s
            },
            alpha_pred: predicted_angle(plan, j)?,
            alpha_meas: angle_from_start_overlap(overlap_start.norm()),
            overlap_marked: overlap_m,
            succ_prob: overlap_m.norm_sqr(),
            dist_to_marked: distance_from_overlap(overlap_m.norm()),
            oracle_calls: counter.calls(),
        });
        Ok(())
    };

    record(&mut records, backend.as_ref(), 0, &counter)?;
    for j in 1..=r {
        backend.apply_step(plan, j, &mut counter)?;
        if options.record_trajectory || j == r {
            record(&mut records, backend.as_ref(), j, &counter)?;
        }
    }

    let final_state = if options.capture_final_state {
        Some(backend.register_state(oracle)?)
    } else {
        None
    };

    let last = *records.last().expect("at least the j=0 row");
    Ok(RunReport {
        algorithm: plan.algorithm(),
        engine,
        n_states: plan.n_states(),
        epsilon: plan.epsilon(),
        records,
        final_dist: last.dist_to_marked,
        final_succ_prob: last.succ_prob,
        total_oracle_calls: last.oracle_calls,
        wall_seconds: started.elapsed().as_secs_f64(),
        final_state,
    })
}
