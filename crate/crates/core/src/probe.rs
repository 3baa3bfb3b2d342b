//! Dense brute-force probes for the splitting and discretization error
//! claims.
//!
//! Everything here builds the search Hamiltonians as explicit matrices and
//! measures operator-norm errors directly, providing the independent route
//! against which the structured engines are validated:
//!
//! * the commutator norm ||[H_0, H_f]|| = sqrt(1/N) sqrt(1 - 1/N),
//! * per-step splitting error ||e^{-i(H_0+H_f)dt} - e^{-iH_0 dt}e^{-iH_f dt}||,
//!   quadratic in dt,
//! * global splitting error at fixed total time, inversely proportional to
//!   the step count,
//! * the distance between the exact schedule propagator U(T) and its R-step
//!   staircase propagator, bounded by sqrt(2 T / R).

use nalgebra::DMatrix;

use crate::dense::{hermitian_expm, operator_norm, unitary_distance, DenseOperator};
use crate::error::{Error, Result};
use crate::schedule::{staircase_error_bound, LocalAdiabaticSchedule};
use crate::C64;

/// Dense H_0 = I - |s><s| and H_f = I - |m><m| for an n-qubit database.
pub fn dense_search_hamiltonians(
    n_qubits: u32,
    marked: usize,
) -> Result<(DenseOperator, DenseOperator)> {
    if n_qubits == 0 || n_qubits > 12 {
        return Err(Error::QubitCountOutOfRange {
            n: n_qubits,
            min: 1,
            max: 12,
        });
    }
    let dim = 1usize << n_qubits;
    if marked >= dim {
        return Err(Error::MarkedOutOfRange {
            marked,
            n: n_qubits,
        });
    }
    let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let uniform = vec![amp; dim];
    let mut marked_vec = vec![C64::new(0.0, 0.0); dim];
    marked_vec[marked] = C64::new(1.0, 0.0);

    let id = DenseOperator::identity(dim)?;
    let h0 = id.sub(&DenseOperator::projector(&uniform)?)?;
    let hf = id.sub(&DenseOperator::projector(&marked_vec)?)?;
    Ok((h0, hf))
}

/// (1-s) H_0 + s H_f as a dense matrix.
pub fn dense_mixed_hamiltonian(
    h0: &DenseOperator,
    hf: &DenseOperator,
    s: f64,
) -> Result<DenseOperator> {
    h0.scale(C64::new(1.0 - s, 0.0))
        .add(&hf.scale(C64::new(s, 0.0)))
}

/// Closed form sqrt(1/N) sqrt(1 - 1/N) for ||[H_0, H_f]||.
pub fn commutator_norm_closed_form(n_states: f64) -> f64 {
    (1.0 / n_states).sqrt() * (1.0 - 1.0 / n_states).sqrt()
}

/// ||e^{-i(H_0+H_f)dt} - e^{-iH_0 dt} e^{-iH_f dt}|| for each requested dt.
pub fn splitting_step_errors(n_qubits: u32, dts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (h0, hf) = dense_search_hamiltonians(n_qubits, 1)?;
    let sum = h0.add(&hf)?;
    dts.iter()
        .map(|&dt| {
            let exact = hermitian_expm(&sum, dt)?;
            let split = hermitian_expm(&h0, dt)?.mul(&hermitian_expm(&hf, dt)?)?;
            Ok((dt, unitary_distance(&exact, &split)?))
        })
        .collect()
}

/// ||e^{-i(H_0+H_f)T} - (e^{-iH_0 dT} e^{-iH_f dT})^R|| at the fixed total
/// time T = (pi/2) sqrt(N), for each requested step count R.
pub fn splitting_global_errors(n_qubits: u32, step_counts: &[u64]) -> Result<Vec<(f64, f64)>> {
    let (h0, hf) = dense_search_hamiltonians(n_qubits, 1)?;
    let sum = h0.add(&hf)?;
    let total = std::f64::consts::FRAC_PI_2 * ((1u64 << n_qubits) as f64).sqrt();
    let exact = hermitian_expm(&sum, total)?;
    step_counts
        .iter()
        .map(|&r| {
            let dt = total / r as f64;
            let step = hermitian_expm(&h0, dt)?.mul(&hermitian_expm(&hf, dt)?)?;
            Ok((r as f64, unitary_distance(&exact, &step.pow(r))?))
        })
        .collect()
}

/// Least-squares slope of ln(y) against ln(x).
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Outcome of one staircase-discretization probe.
#[derive(Debug, Clone, Copy)]
pub struct StaircaseProbe {
    pub steps: usize,
    /// ||U(T) - U'(T)|| measured dense.
    pub distance: f64,
    /// sqrt(2 T / R).
    pub bound: f64,
}

/// Dense propagator of the time-dependent H(s(t)) over [0, T], integrated
/// column-wise with a classical fourth-order scheme; the step count is
/// doubled until the result moves by less than `convergence`.
pub fn dense_schedule_propagator(
    n_qubits: u32,
    schedule: &LocalAdiabaticSchedule,
    convergence: f64,
) -> Result<DenseOperator> {
    let (h0, hf) = dense_search_hamiltonians(n_qubits, 1)?;
    let total = schedule.total_time();
    let mut steps = ((total / 0.02).ceil() as usize).max(64);
    let mut coarse = integrate_matrix(&h0, &hf, schedule, total, steps)?;
    for _ in 0..12 {
        steps *= 2;
        let fine = integrate_matrix(&h0, &hf, schedule, total, steps)?;
        let change = operator_norm(&fine.sub(&coarse)?)?;
        if change <= convergence {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::ConvergenceFailure {
        refinements: 12,
        last_change: f64::NAN,
        target: convergence,
    })
}

fn integrate_matrix(
    h0: &DenseOperator,
    hf: &DenseOperator,
    schedule: &LocalAdiabaticSchedule,
    total: f64,
    steps: usize,
) -> Result<DenseOperator> {
    let dim = h0.dim();
    let h_at = |t: f64| -> Result<DMatrix<C64>> {
        let s = schedule.s_of_t(t.clamp(0.0, total))?;
        Ok(dense_mixed_hamiltonian(h0, hf, s)?.matrix().clone())
    };
    let mut u = DMatrix::<C64>::identity(dim, dim);
    let h = total / steps as f64;
    let minus_i = -C64::i();
    for k in 0..steps {
        let t = k as f64 * h;
        let h1 = h_at(t)?;
        let h2 = h_at(t + h / 2.0)?;
        let h3 = h_at(t + h)?;
        let k1 = (&h1 * &u) * minus_i;
        let k2 = (&h2 * (&u + &k1 * C64::new(h / 2.0, 0.0))) * minus_i;
        let k3 = (&h2 * (&u + &k2 * C64::new(h / 2.0, 0.0))) * minus_i;
        let k4 = (&h3 * (&u + &k3 * C64::new(h, 0.0))) * minus_i;
        u += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    Ok(DenseOperator::from_matrix(u))
}

/// Measures ||U(T) - U'(T)|| for the R-step staircase against the exact
/// schedule propagator, both dense, and pairs it with the bound.
pub fn staircase_propagator_probe(
    n_qubits: u32,
    epsilon: f64,
    steps: usize,
) -> Result<StaircaseProbe> {
    let n_states = (1u64 << n_qubits) as f64;
    let schedule = LocalAdiabaticSchedule::new(n_states, epsilon)?;
    let exact = dense_schedule_propagator(n_qubits, &schedule, 1e-8)?;

    let (h0, hf) = dense_search_hamiltonians(n_qubits, 1)?;
    let dt = schedule.total_time() / steps as f64;
    let dim = h0.dim();
    let mut staircase = DenseOperator::identity(dim)?;
    for (_, s_j) in schedule.staircase(steps)? {
        let h_j = dense_mixed_hamiltonian(&h0, &hf, s_j)?;
        staircase = hermitian_expm(&h_j, dt)?.mul(&staircase)?;
    }

    Ok(StaircaseProbe {
        steps,
        distance: unitary_distance(&exact, &staircase)?,
        bound: staircase_error_bound(&schedule, steps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn commutator_norm_matches_closed_form_dense() {
        for n in [2u32, 3, 4] {
            let (h0, hf) = dense_search_hamiltonians(n, 1).unwrap();
            let comm = h0.commutator(&hf).unwrap();
            let measured = operator_norm(&comm).unwrap();
            let expected = commutator_norm_closed_form((1u64 << n) as f64);
            assert_abs_diff_eq!(measured, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn step_error_is_quadratic_and_bounded_by_commutator() {
        // N = 8, dt = 0.1: error lies in (0, ||[H_0,H_f]|| dt^2]
        let errs = splitting_step_errors(3, &[0.1]).unwrap();
        let (dt, err) = errs[0];
        let comm = commutator_norm_closed_form(8.0);
        assert!(err > 0.0);
        assert!(err <= comm * dt * dt, "err {err} vs {}", comm * dt * dt);

        let errs = splitting_step_errors(3, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        let slope = loglog_slope(&errs);
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn global_error_scales_inversely_with_steps() {
        let errs = splitting_global_errors(4, &[64, 128, 256, 512]).unwrap();
        let slope = loglog_slope(&errs);
        assert!((slope + 1.0).abs() < 0.25, "slope {slope}");
        // halving check: R doubled -> error halves within 25%
        for pair in errs.windows(2) {
            let ratio = pair[1].1 / pair[0].1;
            assert!((ratio - 0.5).abs() < 0.125, "ratio {ratio}");
        }
    }

    #[test]
    fn loglog_slope_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (x, 3.0 * x * x))
            .collect();
        assert_abs_diff_eq!(loglog_slope(&pts), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn staircase_probe_respects_bound() {
        let probe = staircase_propagator_probe(3, 0.5, 8).unwrap();
        assert!(probe.distance > 0.0);
        assert!(probe.distance <= probe.bound);
    }

    #[test]
    fn probe_qubit_cap() {
        assert!(dense_search_hamiltonians(13, 0).is_err());
        assert!(dense_search_hamiltonians(0, 0).is_err());
    }
}
