//! Cross-engine agreement: the statevector, gate, and two-level engines must
//! produce the same states for the same step plans.

use qsearch_core::gates::{compile_marked_evolution, compile_mixing_evolution, execute_register};
use qsearch_core::plan::{build_plan, Algorithm};
use qsearch_core::run::{execute_plan, EngineKind, RunOptions};
use qsearch_core::statevector::{phase_distance, OracleCounter, OracleSpec, PureState};
use qsearch_core::twolevel::{embed, TwoLevelState};

fn run_statevector(plan: &qsearch_core::StepPlan, oracle: &OracleSpec) -> PureState {
    let mut psi = PureState::uniform(oracle.n_qubits()).unwrap();
    let mut counter = OracleCounter::new();
    for step in plan.steps() {
        match plan.algorithm() {
            Algorithm::Grover => psi.grover_iteration(oracle, &mut counter).unwrap(),
            _ => {
                psi.evolve_marked_hamiltonian(oracle, step.dtf, &mut counter)
                    .unwrap();
                psi.evolve_mixing_hamiltonian(step.dt0).unwrap();
            }
        }
    }
    psi
}

fn run_twolevel(plan: &qsearch_core::StepPlan) -> TwoLevelState {
    let mut st = TwoLevelState::uniform_start(plan.n_states()).unwrap();
    for step in plan.steps() {
        match plan.algorithm() {
            Algorithm::Grover => st.grover_step(),
            _ => {
                st.evolve_marked(step.dtf);
                st.evolve_mixing(step.dt0);
            }
        }
    }
    st
}

#[test]
fn statevector_and_twolevel_agree_on_every_plan() {
    for n in [4u32, 8, 12] {
        let oracle = OracleSpec::new(n, (1usize << n) / 3).unwrap();
        for (alg, eps) in [
            (Algorithm::Grover, None),
            (Algorithm::Analog, Some(0.2)),
            (Algorithm::Adiabatic, Some(0.5)),
        ] {
            let plan = build_plan(alg, n, eps).unwrap();
            let full = run_statevector(&plan, &oracle);
            let reduced = embed(&run_twolevel(&plan), &oracle).unwrap();
            let dist = phase_distance(&full, &reduced).unwrap();
            assert!(
                dist <= 1e-9,
                "{} n={n}: engines disagree by {dist}",
                alg.name()
            );
        }
    }
}

#[test]
fn gates_and_statevector_agree_amplitude_exactly_on_hamiltonian_plans() {
    let n = 5;
    let oracle = OracleSpec::new(n, 27).unwrap();
    for (alg, eps) in [
        (Algorithm::Analog, Some(0.25)),
        (Algorithm::Adiabatic, Some(0.6)),
    ] {
        let plan = build_plan(alg, n, eps).unwrap();
        let reference = run_statevector(&plan, &oracle);

        let mut via_gates = PureState::uniform(n).unwrap();
        let mut counter = OracleCounter::new();
        for step in plan.steps() {
            let mut seq = compile_marked_evolution(step.dtf);
            seq.extend(&compile_mixing_evolution(step.dt0));
            execute_register(&mut via_gates, &seq, &oracle, &mut counter).unwrap();
        }
        for (a, b) in via_gates.amplitudes().iter().zip(reference.amplitudes()) {
            assert!((a - b).norm() < 1e-11, "{}: amplitude drift", alg.name());
        }
        assert_eq!(counter.calls(), 2 * plan.step_count() as u64);
    }
}

#[test]
fn grover_iteration_equals_hamiltonian_step_up_to_sign() {
    let n = 6;
    let oracle = OracleSpec::new(n, 40).unwrap();
    let mut counter = OracleCounter::new();
    let mut via_iteration = PureState::uniform(n).unwrap();
    let mut via_hamiltonians = PureState::uniform(n).unwrap();
    for j in 1..=5 {
        via_iteration.grover_iteration(&oracle, &mut counter).unwrap();
        via_hamiltonians
            .evolve_marked_hamiltonian(&oracle, std::f64::consts::PI, &mut counter)
            .unwrap();
        via_hamiltonians
            .evolve_mixing_hamiltonian(std::f64::consts::PI)
            .unwrap();
        // equal up to the accumulated global sign (-1)^j
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        for (a, b) in via_iteration
            .amplitudes()
            .iter()
            .zip(via_hamiltonians.amplitudes())
        {
            assert!((a - b * sign).norm() < 1e-12);
        }
        assert!(phase_distance(&via_iteration, &via_hamiltonians).unwrap() < 1e-12);
    }
}

#[test]
fn execute_plan_reports_match_direct_evolution() {
    let n = 7;
    let oracle = OracleSpec::new(n, 100).unwrap();
    let plan = build_plan(Algorithm::Analog, n, Some(0.3)).unwrap();
    let report = execute_plan(
        &plan,
        EngineKind::Statevector,
        Some(&oracle),
        RunOptions::default(),
    )
    .unwrap();
    let direct = run_statevector(&plan, &oracle);
    let last = report.final_record();
    let overlap = direct.marked_overlap(&oracle).unwrap();
    assert!((last.overlap_marked - overlap).norm() < 1e-12);
    assert_eq!(report.records.len(), plan.step_count() + 1);

    // cumulative oracle calls are nondecreasing
    for pair in report.records.windows(2) {
        assert!(pair[1].oracle_calls >= pair[0].oracle_calls);
    }
}
