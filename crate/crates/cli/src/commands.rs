//! Implementations of the four subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qsearch_core::checks::{run_checks, BoundKind, CheckLevel, Tolerances};
use qsearch_core::gates::{compile_marked_evolution, compile_mixing_evolution, GateSequence};
use qsearch_core::plan::{build_plan_with_steps, Algorithm, StepPlan};
use qsearch_core::probe::loglog_slope;
use qsearch_core::run::{execute_plan, EngineKind, RunOptions};
use qsearch_core::schedule::LocalAdiabaticSchedule;
use qsearch_core::statevector::OracleSpec;
use qsearch_core::textfmt::float17;
use qsearch_core::twolevel::spectral_point;

use crate::{RunArgs, ScheduleArgs, SweepArgs, VerifyArgs};

/// Configuration problems exit with 2, failures during execution with 3.
pub enum CliError {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid configuration: {e:#}"),
            CliError::Run(e) => write!(f, "run failed: {e:#}"),
        }
    }
}

// `{err:#}` in main
impl fmt::Debug for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

type CliResult = Result<ExitCode, CliError>;

fn config_err<T>(e: impl Into<anyhow::Error>) -> Result<T, CliError> {
    Err(CliError::Config(e.into()))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::Run),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// `random:<seed>` or a literal basis index.
fn resolve_marked(spec: &str, n_qubits: u32) -> Result<usize, CliError> {
    let dim = 1usize << n_qubits;
    if let Some(seed_text) = spec.strip_prefix("random:") {
        let seed: u64 = match seed_text.parse() {
            Ok(s) => s,
            Err(e) => return config_err(anyhow!("marked: bad seed `{seed_text}`: {e}")),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(rng.gen_range(0..dim))
    } else {
        match spec.parse::<usize>() {
            Ok(m) if m < dim => Ok(m),
            Ok(m) => config_err(anyhow!(
                "marked: index {m} out of range for {n_qubits} qubits"
            )),
            Err(e) => config_err(anyhow!("marked: `{spec}` is neither an index nor random:<seed>: {e}")),
        }
    }
}

fn parse_algorithm(text: &str) -> Result<Algorithm, CliError> {
    Algorithm::from_str(text).or_else(|e| config_err(e))
}

fn parse_engine(text: &str) -> Result<EngineKind, CliError> {
    EngineKind::from_str(text).or_else(|e| config_err(e))
}

fn gate_program(plan: &StepPlan) -> GateSequence {
    let mut program = GateSequence::default();
    for step in plan.steps() {
        program.extend(&compile_marked_evolution(step.dtf));
        program.extend(&compile_mixing_evolution(step.dt0));
    }
    program
}

pub fn run(args: RunArgs) -> CliResult {
    let algorithm = parse_algorithm(&args.alg)?;
    let engine = parse_engine(&args.engine)?;
    let plan = build_plan_with_steps(algorithm, args.n_qubits, args.epsilon, args.steps)
        .or_else(config_err)?;
    let marked = resolve_marked(&args.marked, args.n_qubits)?;
    let oracle = OracleSpec::new(args.n_qubits, marked).or_else(config_err)?;

    let options = RunOptions {
        record_trajectory: true,
        capture_final_state: args.shots.is_some(),
    };
    let report = execute_plan(&plan, engine, Some(&oracle), options)
        .map_err(|e| CliError::Run(e.into()))?;

    let mut header: Vec<(String, String)> = vec![
        ("alg".into(), algorithm.name().into()),
        ("engine".into(), engine.name().into()),
        ("n_qubits".into(), args.n_qubits.to_string()),
        ("n_states".into(), format!("{}", 1u64 << args.n_qubits)),
        ("marked".into(), marked.to_string()),
        ("marked_spec".into(), args.marked.clone()),
    ];
    if let Some(eps) = plan.epsilon() {
        header.push(("epsilon".into(), float17(eps)));
    }
    header.push(("steps".into(), plan.step_count().to_string()));
    if let Some(shots) = args.shots {
        header.push(("shots".into(), shots.to_string()));
        header.push(("shot_seed".into(), args.shot_seed.to_string()));
    }

    let mut csv = report.to_csv(&header);
    if let Some(shots) = args.shots {
        let state = report
            .final_state
            .as_ref()
            .ok_or_else(|| CliError::Run(anyhow!("final state unavailable for sampling")))?;
        let counts = state
            .measure_counts(shots, args.shot_seed)
            .map_err(|e| CliError::Run(e.into()))?;
        for (basis_index, count) in counts {
            csv.push_str(&format!("# count[{basis_index}]={count}\n"));
        }
    }

    if let Some(path) = &args.emit_gates {
        write_output(Some(path), &gate_program(&plan).to_string())?;
    }
    if let Some(path) = &args.emit_plan {
        write_output(Some(path), &plan.to_csv())?;
    }
    write_output(args.out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

pub fn schedule(args: ScheduleArgs) -> CliResult {
    let n_states = match (args.n_qubits, args.n_states) {
        (Some(n), None) => {
            if n == 0 || n > 63 {
                return config_err(anyhow!("n_qubits: {n} out of range"));
            }
            (1u64 << n) as f64
        }
        (None, Some(n)) => n,
        _ => return config_err(anyhow!("exactly one of --n-qubits / --n-states is required")),
    };
    if args.samples < 2 {
        return config_err(anyhow!("samples: need at least 2, got {}", args.samples));
    }
    let sched = LocalAdiabaticSchedule::new(n_states, args.epsilon).or_else(config_err)?;

    let mut csv = String::new();
    csv.push_str(&format!("# n_states={}\n", float17(n_states)));
    csv.push_str(&format!("# epsilon={}\n", float17(args.epsilon)));
    csv.push_str(&format!("# samples={}\n", args.samples));
    csv.push_str(&format!("# total_time={}\n", float17(sched.total_time())));
    if let Some(steps) = args.steps {
        csv.push_str(&format!("# steps={steps}\n"));
    }
    csv.push_str("s,t,alpha_exact,alpha_approx,E0,E1,gap\n");
    for k in 0..args.samples {
        let s = k as f64 / (args.samples - 1) as f64;
        let point = spectral_point(s, n_states).map_err(|e| CliError::Run(e.into()))?;
        let approx = qsearch_core::twolevel::ground_state_angle_approx(s, n_states)
            .map_err(|e| CliError::Run(e.into()))?;
        let t = sched.t_of_s(s).map_err(|e| CliError::Run(e.into()))?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            float17(s),
            float17(t),
            float17(point.angle),
            float17(approx),
            float17(point.e0),
            float17(point.e1),
            float17(point.gap)
        ));
    }

    if let Some(steps) = args.steps {
        if steps == 0 {
            return config_err(anyhow!("steps: need at least 1"));
        }
        let staircase_path = match (&args.staircase_out, &args.out) {
            (Some(p), _) => p.clone(),
            (None, Some(out)) => {
                let mut name = out.file_name().unwrap_or_default().to_os_string();
                name.push(".staircase.csv");
                out.with_file_name(name)
            }
            (None, None) => {
                return config_err(anyhow!(
                    "--staircase-out is required when --steps is used with stdout output"
                ))
            }
        };
        let stairs = sched.staircase(steps).map_err(|e| CliError::Run(e.into()))?;
        let dt = sched.total_time() / steps as f64;
        let mut sc = String::from("t,s_staircase\n");
        for (j, &(t_j, s_j)) in stairs.iter().enumerate() {
            let t_prev = j as f64 * dt;
            sc.push_str(&format!("{},{}\n", float17(t_prev), float17(s_j)));
            sc.push_str(&format!("{},{}\n", float17(t_j), float17(s_j)));
        }
        write_output(Some(&staircase_path), &sc)?;
    }

    write_output(args.out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Clone, Copy, PartialEq)]
enum SweepAxis {
    Steps,
    Size,
    Epsilon,
}

impl SweepAxis {
    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "R" => Ok(SweepAxis::Steps),
            "N" => Ok(SweepAxis::Size),
            "epsilon" => Ok(SweepAxis::Epsilon),
            other => config_err(anyhow!("axis: `{other}` (expected R|N|epsilon)")),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepAxis::Steps => "R",
            SweepAxis::Size => "N",
            SweepAxis::Epsilon => "epsilon",
        }
    }
}

struct SweepElement {
    value: f64,
    rep: u32,
    n_qubits: u32,
    epsilon: Option<f64>,
    steps: Option<u64>,
    marked: usize,
}

struct SweepRow {
    value: f64,
    rep: u32,
    marked: usize,
    n_qubits: u32,
    epsilon: Option<f64>,
    steps: usize,
    final_dist: f64,
    succ_prob: f64,
    oracle_calls: u64,
}

pub fn sweep(args: SweepArgs) -> CliResult {
    let algorithm = parse_algorithm(&args.alg)?;
    let engine = parse_engine(&args.engine)?;
    let axis = SweepAxis::parse(&args.axis)?;
    if args.reps == 0 {
        return config_err(anyhow!("reps: need at least 1"));
    }

    let raw_values: Vec<&str> = args.values.split(',').filter(|v| !v.is_empty()).collect();
    if raw_values.is_empty() {
        return config_err(anyhow!("values: empty list"));
    }
    let mut values: Vec<f64> = Vec::with_capacity(raw_values.len());
    for v in &raw_values {
        let parsed: f64 = v
            .parse()
            .map_err(|e| CliError::Config(anyhow!("values: `{v}`: {e}")))?;
        values.push(parsed);
    }
    if !values.windows(2).all(|w| w[0] < w[1]) {
        return config_err(anyhow!("values: must be strictly increasing"));
    }

    // resolve per-element configuration
    let mut elements = Vec::new();
    for (vi, &value) in values.iter().enumerate() {
        let (n_qubits, epsilon, steps) = match axis {
            SweepAxis::Steps => {
                let n = args
                    .n_qubits
                    .ok_or_else(|| CliError::Config(anyhow!("--n-qubits required for axis R")))?;
                if value.fract() != 0.0 || value < 1.0 {
                    return config_err(anyhow!("values: step count `{value}` is not a positive integer"));
                }
                (n, args.epsilon, Some(value as u64))
            }
            SweepAxis::Size => {
                if value.fract() != 0.0 || value < 2.0 {
                    return config_err(anyhow!("values: database size `{value}` is invalid"));
                }
                let n_states = value as u64;
                if !n_states.is_power_of_two() {
                    return config_err(anyhow!(
                        "values: database size {n_states} is not a power of two"
                    ));
                }
                (n_states.trailing_zeros(), args.epsilon, None)
            }
            SweepAxis::Epsilon => {
                let n = args
                    .n_qubits
                    .ok_or_else(|| CliError::Config(anyhow!("--n-qubits required for axis epsilon")))?;
                (n, Some(value), None)
            }
        };
        for rep in 0..args.reps {
            let element_index = (vi * args.reps as usize + rep as usize) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(
                args.seed.wrapping_add(element_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let marked = rng.gen_range(0..(1usize << n_qubits));
            elements.push(SweepElement {
                value,
                rep,
                n_qubits,
                epsilon,
                steps,
                marked,
            });
        }
    }

    // fail configuration problems before spawning workers
    for e in &elements {
        build_plan_with_steps(algorithm, e.n_qubits, e.epsilon, e.steps).or_else(config_err)?;
    }

    let threads = args
        .threads
        .or_else(|| {
            std::env::var("QSEARCH_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Run(e.into()))?;

    let results: Vec<Result<SweepRow, qsearch_core::Error>> = pool.install(|| {
        elements
            .par_iter()
            .map(|e| {
                let plan = build_plan_with_steps(algorithm, e.n_qubits, e.epsilon, e.steps)?;
                let oracle = OracleSpec::new(e.n_qubits, e.marked)?;
                let report = execute_plan(
                    &plan,
                    engine,
                    Some(&oracle),
                    RunOptions {
                        record_trajectory: false,
                        capture_final_state: false,
                    },
                )?;
                Ok(SweepRow {
                    value: e.value,
                    rep: e.rep,
                    marked: e.marked,
                    n_qubits: e.n_qubits,
                    epsilon: e.epsilon,
                    steps: plan.step_count(),
                    final_dist: report.final_dist,
                    succ_prob: report.final_succ_prob,
                    oracle_calls: report.total_oracle_calls,
                })
            })
            .collect()
    });

    let mut csv = String::new();
    csv.push_str(&format!("# axis={}\n", axis.name()));
    csv.push_str(&format!("# values={}\n", args.values));
    csv.push_str(&format!("# alg={}\n", algorithm.name()));
    csv.push_str(&format!("# engine={}\n", engine.name()));
    if let Some(n) = args.n_qubits {
        csv.push_str(&format!("# n_qubits={n}\n"));
    }
    if let (Some(eps), true) = (args.epsilon, axis != SweepAxis::Epsilon) {
        csv.push_str(&format!("# epsilon={}\n", float17(eps)));
    }
    csv.push_str(&format!("# reps={}\n", args.reps));
    csv.push_str(&format!("# seed={}\n", args.seed));
    csv.push_str("axis_value,rep,marked,n_qubits,epsilon,steps,final_dist,succ_prob,oracle_calls\n");

    let mut failure: Option<qsearch_core::Error> = None;
    let mut rows: Vec<&SweepRow> = Vec::new();
    for result in &results {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                failure = Some(e.clone());
                break;
            }
        }
    }
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            float17(row.value),
            row.rep,
            row.marked,
            row.n_qubits,
            row.epsilon.map(float17).unwrap_or_default(),
            row.steps,
            float17(row.final_dist),
            float17(row.succ_prob),
            row.oracle_calls
        ));
    }

    // fitted log-log slope of the mean final distance against the axis
    if failure.is_none() && matches!(axis, SweepAxis::Steps | SweepAxis::Size) && values.len() >= 2
    {
        let points: Vec<(f64, f64)> = values
            .iter()
            .map(|&v| {
                let group: Vec<&&SweepRow> = rows.iter().filter(|r| r.value == v).collect();
                let mean = group.iter().map(|r| r.final_dist).sum::<f64>() / group.len() as f64;
                (v, mean.max(f64::MIN_POSITIVE))
            })
            .collect();
        csv.push_str(&format!("# loglog_slope={}\n", float17(loglog_slope(&points))));
    }

    write_output(args.out.as_deref(), &csv)?;
    if let Some(e) = failure {
        return Err(CliError::Run(anyhow!(e).context("sweep element failed; partial results flushed")));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: VerifyArgs) -> CliResult {
    let level = CheckLevel::from_str(&args.level).or_else(config_err)?;
    let outcomes = run_checks(level, &Tolerances::default()).map_err(|e| CliError::Run(e.into()))?;
    let mut failures = 0usize;
    for o in &outcomes {
        let relation = match o.kind {
            BoundKind::AtMost => "<=",
            BoundKind::AtLeast => ">=",
        };
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} {:.6e} {relation} {:.6e}",
            o.name, o.measured, o.bound
        );
        if !o.pass {
            failures += 1;
        }
    }
    println!(
        "{} checks, {} failed ({:?} level)",
        outcomes.len(),
        failures,
        level
    );
    if failures > 0 {
        Ok(ExitCode::from(4))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
