//! Per-step duration tables for the three search algorithms.
//!
//! Each algorithm is realized as R steps of the same shape
//! `e^{-i H_0 dt0_j} e^{-i H_f dtf_j}`:
//!
//! | algorithm | steps R                    | durations                            |
//! |-----------|----------------------------|--------------------------------------|
//! | grover    | floor((pi/4) sqrt N)       | dt0 = dtf = pi                       |
//! | analog    | floor(sqrt(N) / eps)       | dt0 = dtf = dT = T_an / R            |
//! | adiabatic | floor(sqrt(N) / eps^3)     | dt0 = (1-s_j) dT, dtf = s_j dT       |
//!
//! with T_an = (pi/2) sqrt(N), dT = total/R after flooring (so the plan ends
//! exactly at the total time and s_R = 1), and s_j read off the local
//! adiabatic schedule at the right endpoint t_j = j dT. The grover durations
//! come from e^{-i H pi} being the corresponding reflection up to sign.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::schedule::LocalAdiabaticSchedule;
use crate::textfmt::float17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Grover,
    Analog,
    Adiabatic,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Grover => "grover",
            Algorithm::Analog => "analog",
            Algorithm::Adiabatic => "adiabatic",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grover" => Ok(Algorithm::Grover),
            "analog" => Ok(Algorithm::Analog),
            "adiabatic" => Ok(Algorithm::Adiabatic),
            other => Err(Error::InvalidInput {
                what: "algorithm",
                detail: format!("`{other}` (expected grover|analog|adiabatic)"),
            }),
        }
    }
}

/// One step: optional mixing value, then the two applied durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanStep {
    /// Mixing parameter s_j; only the adiabatic plan has one.
    pub s: Option<f64>,
    /// Duration under H_0.
    pub dt0: f64,
    /// Duration under H_f.
    pub dtf: f64,
}

/// Immutable table of per-step durations realizing one algorithm.
#[derive(Debug, Clone)]
pub struct StepPlan {
    algorithm: Algorithm,
    n_states: f64,
    n_qubits: Option<u32>,
    epsilon: Option<f64>,
    /// Schedule time advanced per step (grover: applied duration 2 pi).
    step_time: f64,
    steps: Vec<PlanStep>,
}

/// floor(q), except that values within one part in 10^9 of an integer are
/// treated as that integer: 0.2 is not exactly representable, so e.g.
/// sqrt(N)/eps^3 at N = 1024, eps = 0.2 must still give 4000, not 3999.
fn floor_step_count(q: f64) -> u64 {
    let nearest = q.round();
    if (q - nearest).abs() <= 1e-9 * q.abs().max(1.0) {
        nearest as u64
    } else {
        q.floor() as u64
    }
}

fn check_epsilon(epsilon: Option<f64>, algorithm: Algorithm) -> Result<f64> {
    match algorithm {
        Algorithm::Grover => Ok(f64::NAN),
        _ => {
            let eps = epsilon.ok_or(Error::InvalidInput {
                what: "epsilon",
                detail: format!("required for the {} plan", algorithm.name()),
            })?;
            if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name: "epsilon",
                    value: eps,
                    range: "(0, 1)",
                });
            }
            Ok(eps)
        }
    }
}

/// Builds the default step plan for an n-qubit database (N = 2^n).
pub fn build_plan(algorithm: Algorithm, n_qubits: u32, epsilon: Option<f64>) -> Result<StepPlan> {
    build_plan_with_steps(algorithm, n_qubits, epsilon, None)
}

/// Same, with an explicit step-count override replacing the floor formula.
pub fn build_plan_with_steps(
    algorithm: Algorithm,
    n_qubits: u32,
    epsilon: Option<f64>,
    steps_override: Option<u64>,
) -> Result<StepPlan> {
    if n_qubits == 0 || n_qubits > crate::tolerance::MAX_QUBITS {
        return Err(Error::QubitCountOutOfRange {
            n: n_qubits,
            min: 1,
            max: crate::tolerance::MAX_QUBITS,
        });
    }
    let n_states = (1u64 << n_qubits) as f64;
    let mut plan = build_plan_for_size(algorithm, n_states, epsilon, steps_override)?;
    plan.n_qubits = Some(n_qubits);
    Ok(plan)
}

/// Builds a plan for an arbitrary (real) database size; the statevector and
/// gate engines require a power of two, the two-level engine does not.
pub fn build_plan_for_size(
    algorithm: Algorithm,
    n_states: f64,
    epsilon: Option<f64>,
    steps_override: Option<u64>,
) -> Result<StepPlan> {
    if !(n_states.is_finite() && n_states >= 2.0) {
        return Err(Error::ParameterOutOfRange {
            name: "n_states",
            value: n_states,
            range: ">= 2",
        });
    }
    let eps = check_epsilon(epsilon, algorithm)?;
    let sqrt_n = n_states.sqrt();

    let default_r = match algorithm {
        Algorithm::Grover => floor_step_count(std::f64::consts::FRAC_PI_4 * sqrt_n),
        Algorithm::Analog => floor_step_count(sqrt_n / eps),
        // sequential division, not eps.powi(3): see floor_step_count
        Algorithm::Adiabatic => floor_step_count(sqrt_n / eps / eps / eps),
    };
    let r = steps_override.unwrap_or(default_r);
    if r == 0 {
        return Err(Error::EmptyPlan { n_states, epsilon });
    }

    let (step_time, steps) = match algorithm {
        Algorithm::Grover => {
            let pi = std::f64::consts::PI;
            let step = PlanStep {
                s: None,
                dt0: pi,
                dtf: pi,
            };
            (2.0 * pi, vec![step; r as usize])
        }
        Algorithm::Analog => {
            let total = std::f64::consts::FRAC_PI_2 * sqrt_n;
            let dt = total / r as f64;
            let step = PlanStep {
                s: None,
                dt0: dt,
                dtf: dt,
            };
            (dt, vec![step; r as usize])
        }
        Algorithm::Adiabatic => {
            let schedule = LocalAdiabaticSchedule::new(n_states, eps)?;
            let dt = schedule.total_time() / r as f64;
            let steps = schedule
                .staircase(r as usize)?
                .into_iter()
                .map(|(_, s)| PlanStep {
                    s: Some(s),
                    dt0: (1.0 - s) * dt,
                    dtf: s * dt,
                })
                .collect();
            (dt, steps)
        }
    };

    Ok(StepPlan {
        algorithm,
        n_states,
        n_qubits: None,
        epsilon: epsilon.filter(|_| algorithm != Algorithm::Grover),
        step_time,
        steps,
    })
}

impl StepPlan {
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn n_states(&self) -> f64 {
        self.n_states
    }

    pub fn n_qubits(&self) -> Option<u32> {
        self.n_qubits
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    /// Schedule time advanced per step.
    pub fn step_time(&self) -> f64 {
        self.step_time
    }

    /// Total oracle queries a full run costs: grover pays 1 per iteration
    /// (one phase flip), the Hamiltonian algorithms pay 2 per step (the
    /// ancilla-circuit price of e^{-i H_f t}).
    pub fn oracle_budget(&self) -> u64 {
        match self.algorithm {
            Algorithm::Grover => self.steps.len() as u64,
            _ => 2 * self.steps.len() as u64,
        }
    }

    /// CSV table `j,s,dt0,dtf`, one row per step, `s` empty unless the plan
    /// is adiabatic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,s,dt0,dtf\n");
        for (idx, step) in self.steps.iter().enumerate() {
            let s = step.s.map(float17).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                idx + 1,
                s,
                float17(step.dt0),
                float17(step.dtf)
            );
        }
        out
    }
}

/// Closed-form rotation angle after j steps:
/// grover `2j/sqrt(N)`, analog `(eps j/sqrt N)(pi/2)`, adiabatic
/// `(eps^3 j/sqrt N)(pi/2)`. These describe the default step counts; a plan
/// built with an explicit override keeps the same closed forms.
pub fn predicted_angle(plan: &StepPlan, j: usize) -> Result<f64> {
    if j > plan.step_count() {
        return Err(Error::ParameterOutOfRange {
            name: "j",
            value: j as f64,
            range: "0..=R",
        });
    }
    let jf = j as f64;
    let sqrt_n = plan.n_states.sqrt();
    Ok(match plan.algorithm {
        Algorithm::Grover => 2.0 * jf / sqrt_n,
        Algorithm::Analog => {
            let eps = plan.epsilon.unwrap_or(f64::NAN);
            (eps * jf / sqrt_n) * std::f64::consts::FRAC_PI_2
        }
        Algorithm::Adiabatic => {
            let eps = plan.epsilon.unwrap_or(f64::NAN);
            (eps * eps * eps * jf / sqrt_n) * std::f64::consts::FRAC_PI_2
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn grover_plan_n10() {
        let plan = build_plan(Algorithm::Grover, 10, None).unwrap();
        assert_eq!(plan.step_count(), 25);
        for step in plan.steps() {
            assert_eq!(step.dt0, PI);
            assert_eq!(step.dtf, PI);
            assert!(step.s.is_none());
        }
        assert_eq!(plan.oracle_budget(), 25);
    }

    #[test]
    fn analog_plan_n10() {
        let plan = build_plan(Algorithm::Analog, 10, Some(0.1)).unwrap();
        assert_eq!(plan.step_count(), 320);
        for step in plan.steps() {
            assert_abs_diff_eq!(step.dt0, 0.1 * FRAC_PI_2, epsilon = 1e-15);
            assert_eq!(step.dt0, step.dtf);
        }
        assert_eq!(plan.oracle_budget(), 640);
    }

    #[test]
    fn adiabatic_plan_n6() {
        let plan = build_plan(Algorithm::Adiabatic, 6, Some(0.5)).unwrap();
        assert_eq!(plan.step_count(), 64); // floor(8 / 0.125)
        let dt = plan.step_time();
        let schedule = LocalAdiabaticSchedule::new(64.0, 0.5).unwrap();
        assert_abs_diff_eq!(dt, schedule.total_time() / 64.0, epsilon = 1e-15);
        for step in plan.steps() {
            let s = step.s.unwrap();
            assert_abs_diff_eq!(step.dt0, (1.0 - s) * dt, epsilon = 1e-15);
            assert_abs_diff_eq!(step.dtf, s * dt, epsilon = 1e-15);
            assert_abs_diff_eq!(step.dt0 + step.dtf, dt, epsilon = 1e-12);
        }
        // last step sits at s = 1 exactly, so its H_0 share vanishes
        let last = plan.steps().last().unwrap();
        assert_abs_diff_eq!(last.s.unwrap(), 1.0, epsilon = 1e-12);
        assert!(last.dt0.abs() < 1e-12);
    }

    #[test]
    fn adiabatic_step_count_survives_binary_epsilon() {
        // sqrt(1024)/0.2^3 evaluates below 4000 in floating point; the plan
        // must still have 4000 steps.
        let plan = build_plan(Algorithm::Adiabatic, 10, Some(0.2)).unwrap();
        assert_eq!(plan.step_count(), 4000);
        let plan = build_plan(Algorithm::Analog, 10, Some(0.2)).unwrap();
        assert_eq!(plan.step_count(), 160);
    }

    #[test]
    fn epsilon_validation() {
        assert!(build_plan(Algorithm::Analog, 4, None).is_err());
        assert!(build_plan(Algorithm::Adiabatic, 4, Some(0.0)).is_err());
        assert!(build_plan(Algorithm::Adiabatic, 4, Some(1.0)).is_err());
        assert!(build_plan(Algorithm::Grover, 4, None).is_ok());
    }

    #[test]
    fn empty_plan_is_rejected_with_parameters() {
        // N = 4, eps near 1: floor(2/0.999) = 2 ok; grover n=1: floor(pi/4*sqrt2)=1 ok;
        // analog with steps_override 0 must fail.
        let err = build_plan_with_steps(Algorithm::Analog, 4, Some(0.9), Some(0));
        assert!(matches!(err, Err(Error::EmptyPlan { .. })));
    }

    #[test]
    fn predicted_angle_closed_forms() {
        let plan = build_plan(Algorithm::Grover, 10, None).unwrap();
        assert_abs_diff_eq!(
            predicted_angle(&plan, 5).unwrap(),
            10.0 / 32.0,
            epsilon = 1e-15
        );

        let plan = build_plan(Algorithm::Analog, 10, Some(0.1)).unwrap();
        assert_eq!(predicted_angle(&plan, 0).unwrap(), 0.0);

        let plan = build_plan(Algorithm::Adiabatic, 10, Some(0.5)).unwrap();
        assert_eq!(plan.step_count(), 256);
        assert_abs_diff_eq!(
            predicted_angle(&plan, 256).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-12
        );
        assert!(predicted_angle(&plan, 257).is_err());
    }

    #[test]
    fn csv_shape() {
        let plan = build_plan(Algorithm::Adiabatic, 2, Some(0.5)).unwrap();
        assert_eq!(plan.step_count(), 16);
        let csv = plan.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "j,s,dt0,dtf");
        assert_eq!(lines.len(), 17);
        assert!(lines[1].starts_with("1,"));
        // grover/analog rows leave s empty
        let plan = build_plan(Algorithm::Grover, 2, None).unwrap();
        let csv = plan.to_csv();
        let row = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1], "");
    }

    #[test]
    fn override_replaces_step_count() {
        let plan = build_plan_with_steps(Algorithm::Analog, 10, Some(0.1), Some(64)).unwrap();
        assert_eq!(plan.step_count(), 64);
        let total = FRAC_PI_2 * 32.0;
        assert_abs_diff_eq!(plan.step_time(), total / 64.0, epsilon = 1e-15);
    }
}
