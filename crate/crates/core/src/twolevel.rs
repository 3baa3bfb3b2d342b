//! Exact dynamics in the invariant two-dimensional subspace span{|s>, |m>}.
//!
//! All three search algorithms start from |s> and apply operators built from
//! |s><s| and |m><m|, so the state never leaves this plane. We work in the
//! orthonormal basis {|m>, |m_perp>} with
//!
//! ```text
//!   |m_perp> = (|s> - (1/sqrt N) |m>) / sqrt(1 - 1/N),
//! ```
//!
//! which keeps the 2x2 model well conditioned where the printed
//! non-orthogonal {|s>, |m>} expansion is not. N is a real parameter here:
//! schedules can be studied at any database size, not only powers of two;
//! [`embed`]/[`project`] bridge to the statevector engine when N = 2^n.
//!
//! Closed forms implemented below, writing q = (N-1)/N:
//!
//! * mixed Hamiltonian  H(s) = (1-s)(I - |s><s|) + s (I - |m><m|),
//! * its eigenvalues    E_{0,1}(s) = (1 -+ sqrt(1 - 4 q s(1-s))) / 2,
//!   with gap minimized as 1/sqrt(N) at s = 1/2,
//! * the ground-state rotation angle  alpha(s) = arctan[s / (sqrt(N) (E_1(s) - s))],
//!   which equals pi/4 at s = 1/2 for every N,
//! * the evolution under H_0 + H_f from |s>, which is exactly
//!   e^{-it} [cos(t/sqrt N) |s> + i sin(t/sqrt N) |m>] for all N.
//!
//! A classical fourth-order integrator with step-doubling convergence
//! ([`ode_propagate`]) provides the reference for time-dependent H(s(t)).

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::statevector::{OracleSpec, PureState};
use crate::tolerance;
use crate::C64;

/// State coordinates on the orthonormal basis {|m>, |m_perp>}.
#[derive(Debug, Clone, Copy)]
pub struct TwoLevelState {
    n_states: f64,
    c_marked: C64,
    c_perp: C64,
}

/// Spectrum of H(s) at one mixing value.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// Exact ground-state rotation angle alpha(s).
    pub angle: f64,
}

/// Convergence policy for [`ode_propagate`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Initial integrator step size (refined from there).
    pub max_step: f64,
    /// Accept once doubling the step count moves the result by no more than
    /// this (2-norm); the Richardson estimate of the remaining error is then
    /// a factor 15 smaller.
    pub convergence: f64,
    /// Refinement attempts before giving up.
    pub max_refinements: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            max_step: 0.1,
            convergence: tolerance::ODE_CONVERGENCE,
            max_refinements: 16,
        }
    }
}

fn check_n_states(n_states: f64) -> Result<()> {
    if n_states.is_finite() && n_states >= 2.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "n_states",
            value: n_states,
            range: ">= 2",
        })
    }
}

fn check_mixing(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "s",
            value: s,
            range: "[0, 1]",
        })
    }
}

/// (<m|s>, <m_perp|s>) = (1/sqrt N, sqrt(1 - 1/N)).
fn start_coords(n_states: f64) -> (f64, f64) {
    let mu = 1.0 / n_states.sqrt();
    (mu, (1.0 - mu * mu).sqrt())
}

impl TwoLevelState {
    pub fn new(n_states: f64, c_marked: C64, c_perp: C64) -> Result<Self> {
        check_n_states(n_states)?;
        let norm2 = c_marked.norm_sqr() + c_perp.norm_sqr();
        if !norm2.is_finite() {
            return Err(Error::NonFinite {
                context: "two-level coordinates",
            });
        }
        if (norm2.sqrt() - 1.0).abs() > tolerance::INPUT_NORM {
            return Err(Error::NotNormalized {
                norm: norm2.sqrt(),
            });
        }
        Ok(Self {
            n_states,
            c_marked,
            c_perp,
        })
    }

    /// The uniform state |s>.
    pub fn uniform_start(n_states: f64) -> Result<Self> {
        check_n_states(n_states)?;
        let (mu, sp) = start_coords(n_states);
        Ok(Self {
            n_states,
            c_marked: C64::new(mu, 0.0),
            c_perp: C64::new(sp, 0.0),
        })
    }

    /// The marked state |m>.
    pub fn marked(n_states: f64) -> Result<Self> {
        check_n_states(n_states)?;
        Ok(Self {
            n_states,
            c_marked: C64::new(1.0, 0.0),
            c_perp: C64::new(0.0, 0.0),
        })
    }

    pub fn n_states(&self) -> f64 {
        self.n_states
    }

    /// <m|psi>.
    pub fn marked_overlap(&self) -> C64 {
        self.c_marked
    }

    pub fn perp_overlap(&self) -> C64 {
        self.c_perp
    }

    /// <s|psi>.
    pub fn start_overlap(&self) -> C64 {
        let (mu, sp) = start_coords(self.n_states);
        self.c_marked * mu + self.c_perp * sp
    }

    pub fn success_probability(&self) -> f64 {
        self.c_marked.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        (self.c_marked.norm_sqr() + self.c_perp.norm_sqr()).sqrt()
    }

    /// Global-phase-invariant distance to |m>.
    pub fn distance_to_marked(&self) -> f64 {
        (2.0 - 2.0 * self.c_marked.norm().min(1.0)).max(0.0).sqrt()
    }

    /// Global-phase-invariant distance to another state, evaluated as the
    /// direct difference after phase alignment (exact near zero).
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let overlap = other.c_marked.conj() * self.c_marked + other.c_perp.conj() * self.c_perp;
        let rotation = if overlap.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            overlap / overlap.norm()
        };
        ((self.c_marked - rotation * other.c_marked).norm_sqr()
            + (self.c_perp - rotation * other.c_perp).norm_sqr())
        .sqrt()
    }

    /// e^{-i H_f t}: the marked coordinate is untouched, the rest picks up
    /// e^{-it}.
    pub fn evolve_marked(&mut self, t: f64) {
        self.c_perp *= (-C64::i() * t).exp();
    }

    /// e^{-i H_0 t}.
    pub fn evolve_mixing(&mut self, t: f64) {
        let (mu, sp) = start_coords(self.n_states);
        let phase = (-C64::i() * t).exp();
        let overlap = self.c_marked * mu + self.c_perp * sp;
        let correction = (C64::new(1.0, 0.0) - phase) * overlap;
        self.c_marked = phase * self.c_marked + correction * mu;
        self.c_perp = phase * self.c_perp + correction * sp;
    }

    /// Exact Grover iteration G = -U_0 U_f.
    pub fn grover_step(&mut self) {
        let (mu, sp) = start_coords(self.n_states);
        self.c_marked = -self.c_marked; // U_f
        let overlap = self.c_marked * mu + self.c_perp * sp;
        self.c_marked -= overlap * (2.0 * mu); // U_0
        self.c_perp -= overlap * (2.0 * sp);
        self.c_marked = -self.c_marked;
        self.c_perp = -self.c_perp;
    }
}

/// H(s) = (1-s) H_0 + s H_f expressed on {|m>, |m_perp>}; real symmetric.
pub fn hamiltonian_2x2(s: f64, n_states: f64) -> Result<DenseOperator> {
    check_mixing(s)?;
    check_n_states(n_states)?;
    let (h00, h01, h11) = hamiltonian_entries(s, n_states);
    DenseOperator::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(h00, 0.0),
        (1, 1) => C64::new(h11, 0.0),
        _ => C64::new(h01, 0.0),
    })
}

fn hamiltonian_entries(s: f64, n_states: f64) -> (f64, f64, f64) {
    let (mu, sp) = start_coords(n_states);
    let one_minus = 1.0 - s;
    let h00 = one_minus * sp * sp;
    let h01 = -one_minus * mu * sp;
    let h11 = 1.0 - one_minus * sp * sp;
    (h00, h01, h11)
}

/// Closed-form eigenvalues (E_0(s), E_1(s)) of H(s).
pub fn eigenvalues(s: f64, n_states: f64) -> Result<(f64, f64)> {
    check_mixing(s)?;
    check_n_states(n_states)?;
    let q = (n_states - 1.0) / n_states;
    let radicand = (1.0 - 4.0 * q * s * (1.0 - s)).max(0.0);
    let root = radicand.sqrt();
    Ok((0.5 * (1.0 - root), 0.5 * (1.0 + root)))
}

/// Exact ground-state rotation angle alpha(s) in [0, pi/2], nondecreasing,
/// with alpha(0) = 0, alpha(1/2) = pi/4 for every N, alpha(1) = pi/2.
pub fn ground_state_angle(s: f64, n_states: f64) -> Result<f64> {
    check_mixing(s)?;
    check_n_states(n_states)?;
    if s >= 1.0 {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    let (_, e1) = eigenvalues(s, n_states)?;
    // E_1(s) - s >= 0 on [0, 1); clamp rounding noise near s = 1.
    Ok(f64::atan2(s, n_states.sqrt() * (e1 - s).max(0.0)))
}

/// Large-N approximation (1/2) arctan[2s / (sqrt(N)(1-2s))], branch-continued
/// through s = 1/2 so the angle keeps increasing.
pub fn ground_state_angle_approx(s: f64, n_states: f64) -> Result<f64> {
    check_mixing(s)?;
    check_n_states(n_states)?;
    Ok(0.5 * f64::atan2(2.0 * s, n_states.sqrt() * (1.0 - 2.0 * s)))
}

/// Spectrum and angle of H(s) at one point.
pub fn spectral_point(s: f64, n_states: f64) -> Result<SpectralPoint> {
    let (e0, e1) = eigenvalues(s, n_states)?;
    Ok(SpectralPoint {
        s,
        e0,
        e1,
        gap: e1 - e0,
        angle: ground_state_angle(s, n_states)?,
    })
}

/// Exact state after evolving |s> under H_0 + H_f for time t:
/// e^{-it} [cos(t/sqrt N)|s> + i sin(t/sqrt N)|m>], valid for all N.
pub fn analog_exact_state(t: f64, n_states: f64) -> Result<TwoLevelState> {
    check_n_states(n_states)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "t",
            value: t,
            range: ">= 0, finite",
        });
    }
    let (mu, sp) = start_coords(n_states);
    let x = t / n_states.sqrt();
    let global = (-C64::i() * t).exp();
    let c_marked = global * (C64::new(x.cos() * mu, 0.0) + C64::i() * x.sin());
    let c_perp = global * x.cos() * sp;
    Ok(TwoLevelState {
        n_states,
        c_marked,
        c_perp,
    })
}

fn rk4_step(
    s_of_t: &dyn Fn(f64) -> f64,
    n_states: f64,
    t: f64,
    h: f64,
    y: (C64, C64),
) -> (C64, C64) {
    let rhs = |t: f64, y: (C64, C64)| -> (C64, C64) {
        let s = s_of_t(t).clamp(0.0, 1.0);
        let (h00, h01, h11) = hamiltonian_entries(s, n_states);
        let minus_i = -C64::i();
        (
            minus_i * (y.0 * h00 + y.1 * h01),
            minus_i * (y.0 * h01 + y.1 * h11),
        )
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + h / 2.0, (y.0 + k1.0 * (h / 2.0), y.1 + k1.1 * (h / 2.0)));
    let k3 = rhs(t + h / 2.0, (y.0 + k2.0 * (h / 2.0), y.1 + k2.1 * (h / 2.0)));
    let k4 = rhs(t + h, (y.0 + k3.0 * h, y.1 + k3.1 * h));
    (
        y.0 + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0),
        y.1 + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0),
    )
}

fn integrate_fixed(
    initial: &TwoLevelState,
    s_of_t: &dyn Fn(f64) -> f64,
    t_end: f64,
    steps: usize,
) -> (C64, C64) {
    let h = t_end / steps as f64;
    let mut y = (initial.c_marked, initial.c_perp);
    for k in 0..steps {
        y = rk4_step(s_of_t, initial.n_states, k as f64 * h, h, y);
    }
    y
}

/// Integrates i d psi/dt = H(s(t)) psi from `initial` to `t_end`, refining
/// the step count until doubling it no longer moves the result.
pub fn ode_propagate(
    initial: &TwoLevelState,
    s_of_t: impl Fn(f64) -> f64,
    t_end: f64,
    control: StepControl,
) -> Result<TwoLevelState> {
    let (steps, y) = converge(initial, &s_of_t, t_end, control)?;
    let _ = steps;
    Ok(TwoLevelState {
        n_states: initial.n_states,
        c_marked: y.0,
        c_perp: y.1,
    })
}

/// Same integration, recording the state at each requested time (which must
/// be nondecreasing and end at or before `t_end`).
pub fn ode_propagate_sampled(
    initial: &TwoLevelState,
    s_of_t: impl Fn(f64) -> f64,
    t_end: f64,
    sample_times: &[f64],
    control: StepControl,
) -> Result<Vec<TwoLevelState>> {
    let (steps, _) = converge(initial, &s_of_t, t_end, control)?;
    let step_h = t_end / steps as f64;
    let mut out = Vec::with_capacity(sample_times.len());
    let mut y = (initial.c_marked, initial.c_perp);
    let mut t = 0.0;
    for &target in sample_times {
        if target < t - 1e-12 || target > t_end + 1e-9 {
            return Err(Error::ParameterOutOfRange {
                name: "sample time",
                value: target,
                range: "nondecreasing within [0, t_end]",
            });
        }
        let span = (target - t).max(0.0);
        let substeps = (span / step_h).ceil().max(1.0) as usize;
        if span > 0.0 {
            let h = span / substeps as f64;
            for k in 0..substeps {
                y = rk4_step(&s_of_t, initial.n_states, t + k as f64 * h, h, y);
            }
            t = target;
        }
        out.push(TwoLevelState {
            n_states: initial.n_states,
            c_marked: y.0,
            c_perp: y.1,
        });
    }
    Ok(out)
}

fn converge(
    initial: &TwoLevelState,
    s_of_t: &dyn Fn(f64) -> f64,
    t_end: f64,
    control: StepControl,
) -> Result<(usize, (C64, C64))> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "t_end",
            value: t_end,
            range: ">= 0, finite",
        });
    }
    if t_end == 0.0 {
        return Ok((1, (initial.c_marked, initial.c_perp)));
    }
    let mut steps = ((t_end / control.max_step).ceil() as usize).max(8);
    let mut coarse = integrate_fixed(initial, s_of_t, t_end, steps);
    let mut last_change = f64::INFINITY;
    for _ in 0..control.max_refinements {
        steps *= 2;
        let fine = integrate_fixed(initial, s_of_t, t_end, steps);
        last_change =
            ((fine.0 - coarse.0).norm_sqr() + (fine.1 - coarse.1).norm_sqr()).sqrt();
        if last_change <= control.convergence {
            return Ok((steps, fine));
        }
        coarse = fine;
    }
    Err(Error::ConvergenceFailure {
        refinements: control.max_refinements,
        last_change,
        target: control.convergence,
    })
}

/// Lifts two-level coordinates to the full 2^n statevector.
pub fn embed(state: &TwoLevelState, oracle: &OracleSpec) -> Result<PureState> {
    let dim = oracle.n_states();
    if (state.n_states - dim as f64).abs() > 1e-9 {
        return Err(Error::DimMismatch {
            left: state.n_states as usize,
            right: dim,
        });
    }
    let unmarked = state.c_perp / ((dim as f64) - 1.0).sqrt();
    let mut amps = vec![unmarked; dim];
    amps[oracle.marked()] = state.c_marked;
    PureState::from_amplitudes(oracle.n_qubits(), amps)
}

/// Projects a statevector onto span{|s>, |m>}; fails if the residual outside
/// the subspace exceeds tolerance.
pub fn project(psi: &PureState, oracle: &OracleSpec) -> Result<TwoLevelState> {
    let dim = psi.n_states();
    if dim != oracle.n_states() {
        return Err(Error::DimMismatch {
            left: dim,
            right: oracle.n_states(),
        });
    }
    let c_marked = psi.amplitudes()[oracle.marked()];
    let mut unmarked_sum = C64::new(0.0, 0.0);
    for (x, a) in psi.amplitudes().iter().enumerate() {
        if x != oracle.marked() {
            unmarked_sum += a;
        }
    }
    let c_perp = unmarked_sum / ((dim as f64) - 1.0).sqrt();
    // residual by explicit reconstruction: the norm^2 - |c|^2 form cancels
    // catastrophically for states that are actually in the subspace
    let unmarked_component = c_perp / ((dim as f64) - 1.0).sqrt();
    let residual2: f64 = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| {
            if x == oracle.marked() {
                (a - c_marked).norm_sqr()
            } else {
                (a - unmarked_component).norm_sqr()
            }
        })
        .sum();
    let residual = residual2.sqrt();
    if residual > tolerance::SUBSPACE_RESIDUAL {
        return Err(Error::SubspaceViolation { residual });
    }
    Ok(TwoLevelState {
        n_states: dim as f64,
        c_marked,
        c_perp,
    })
}
