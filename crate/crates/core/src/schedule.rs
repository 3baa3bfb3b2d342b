//! The gap-adapted ("local") adiabatic schedule.
//!
//! Sweeping s linearly in time forces a total time O(N) because the sweep
//! rate is constrained by the smallest gap everywhere. Adapting the rate to
//! the instantaneous gap, ds/dt = epsilon g(s)^2, restores the quadratic
//! speedup; integrating that rate gives the closed-form schedule
//!
//! ```text
//!   t(s) = N / (2 eps sqrt(N-1)) [arctan(sqrt(N-1)(2s-1)) + arctan sqrt(N-1)]
//! ```
//!
//! with total time T = t(1) -> (pi / 2 eps) sqrt(N) for large N. The inverse
//! s(t) is elementary, so both directions are exact (no root finding).

use crate::error::{Error, Result};

/// Local adiabatic schedule for database size N and target error epsilon.
#[derive(Debug, Clone, Copy)]
pub struct LocalAdiabaticSchedule {
    n_states: f64,
    epsilon: f64,
    total_time: f64,
}

impl LocalAdiabaticSchedule {
    pub fn new(n_states: f64, epsilon: f64) -> Result<Self> {
        if !(n_states.is_finite() && n_states >= 2.0) {
            return Err(Error::ParameterOutOfRange {
                name: "n_states",
                value: n_states,
                range: ">= 2",
            });
        }
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1)",
            });
        }
        let root = (n_states - 1.0).sqrt();
        let total_time = n_states / (epsilon * root) * root.atan();
        Ok(Self {
            n_states,
            epsilon,
            total_time,
        })
    }

    pub fn n_states(&self) -> f64 {
        self.n_states
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// T = t(1) = (N / (eps sqrt(N-1))) arctan sqrt(N-1).
    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Time at which the schedule reaches mixing value s; strictly
    /// increasing, t(0) = 0, t(1) = total_time.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::ParameterOutOfRange {
                name: "s",
                value: s,
                range: "[0, 1]",
            });
        }
        let root = (self.n_states - 1.0).sqrt();
        let t = self.n_states / (2.0 * self.epsilon * root)
            * ((root * (2.0 * s - 1.0)).atan() + root.atan());
        Ok(t.clamp(0.0, self.total_time))
    }

    /// Closed-form inverse of [`Self::t_of_s`].
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < -1e-9 || t > self.total_time + 1e-9 {
            return Err(Error::ParameterOutOfRange {
                name: "t",
                value: t,
                range: "[0, total_time]",
            });
        }
        let root = (self.n_states - 1.0).sqrt();
        let angle = 2.0 * self.epsilon * root * t / self.n_states - root.atan();
        let s = 0.5 + angle.tan() / (2.0 * root);
        Ok(s.clamp(0.0, 1.0))
    }

    /// Piecewise-constant staircase approximation with R steps: returns the
    /// R right-endpoint pairs (t_j, s_j), s_j = s(t_j), j = 1..=R. The
    /// schedule holds s_j throughout (t_{j-1}, t_j].
    pub fn staircase(&self, steps: usize) -> Result<Vec<(f64, f64)>> {
        if steps == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "steps",
                value: 0.0,
                range: ">= 1",
            });
        }
        let dt = self.total_time / steps as f64;
        (1..=steps)
            .map(|j| {
                let t = if j == steps {
                    self.total_time
                } else {
                    j as f64 * dt
                };
                Ok((t, self.s_of_t(t)?))
            })
            .collect()
    }
}

/// Bound sqrt(2 T / R) on the distance between the exact schedule propagator
/// and its R-step staircase propagator.
pub fn staircase_error_bound(schedule: &LocalAdiabaticSchedule, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "steps",
            value: 0.0,
            range: ">= 1",
        });
    }
    Ok((2.0 * schedule.total_time() / steps as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn schedule_endpoints_and_symmetry() {
        let sched = LocalAdiabaticSchedule::new(1024.0, 0.2).unwrap();
        assert_eq!(sched.t_of_s(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            sched.t_of_s(1.0).unwrap(),
            sched.total_time(),
            epsilon = 1e-12
        );
        // odd symmetry of arctan puts the midpoint at exactly T/2
        assert_abs_diff_eq!(
            sched.t_of_s(0.5).unwrap(),
            sched.total_time() / 2.0,
            epsilon = 1e-12 * sched.total_time()
        );
    }

    #[test]
    fn total_time_closed_form_n4() {
        // N = 4, eps = 0.1: T = 4 arctan(sqrt 3) / (0.1 sqrt 3)
        //                     = (4/(0.2 sqrt 3)) (2 pi / 3) = 24.1839915...
        let sched = LocalAdiabaticSchedule::new(4.0, 0.1).unwrap();
        let expected = 4.0 * 3.0_f64.sqrt().atan() / (0.1 * 3.0_f64.sqrt());
        assert_abs_diff_eq!(sched.total_time(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(sched.total_time(), 24.183991523122902, epsilon = 1e-9);
        assert_abs_diff_eq!(
            sched.t_of_s(1.0).unwrap(),
            24.183991523122902,
            epsilon = 1e-9
        );
    }

    #[test]
    fn total_time_asymptote() {
        // |T 2 eps / (pi sqrt N) - 1| <= 2 / sqrt(N)
        for &n in &[4.0, 64.0, 1024.0, 1048576.0] {
            let sched = LocalAdiabaticSchedule::new(n, 0.3).unwrap();
            let ratio = sched.total_time() * 2.0 * 0.3 / (std::f64::consts::PI * n.sqrt());
            assert!(
                (ratio - 1.0).abs() <= 2.0 / n.sqrt(),
                "N={n}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn t_of_s_is_strictly_increasing() {
        let sched = LocalAdiabaticSchedule::new(32.0, 0.4).unwrap();
        let mut last = -1.0;
        for k in 0..=1000 {
            let t = sched.t_of_s(k as f64 / 1000.0).unwrap();
            assert!(t > last);
            last = t;
        }
    }

    #[test]
    fn round_trip_is_exact_to_1e10() {
        let sched = LocalAdiabaticSchedule::new(1024.0, 0.2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let mut worst = 0.0_f64;
        for _ in 0..1000 {
            let s: f64 = rng.gen_range(0.0..=1.0);
            let back = sched.s_of_t(sched.t_of_s(s).unwrap()).unwrap();
            worst = worst.max((back - s).abs());
        }
        assert!(worst <= 1e-10, "round-trip error {worst}");
    }

    #[test]
    fn s_of_t_endpoints() {
        let sched = LocalAdiabaticSchedule::new(100.0, 0.5).unwrap();
        assert_eq!(sched.s_of_t(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(sched.s_of_t(sched.total_time()).unwrap(), 1.0, epsilon = 1e-12);
        assert!(sched.s_of_t(sched.total_time() * 1.01).is_err());
        assert!(sched.s_of_t(-0.1).is_err());
    }

    #[test]
    fn staircase_is_monotone_and_ends_at_one() {
        let sched = LocalAdiabaticSchedule::new(32.0, 0.5).unwrap();
        let stairs = sched.staircase(20).unwrap();
        assert_eq!(stairs.len(), 20);
        let mut last_s = 0.0;
        for &(_, s) in &stairs {
            assert!(s >= last_s);
            last_s = s;
        }
        assert_abs_diff_eq!(stairs.last().unwrap().1, 1.0, epsilon = 1e-12);

        // the schedule dwells where the gap is smallest, so the risers are
        // smallest near t = T/2 and largest at the ends
        let risers: Vec<f64> = std::iter::once(stairs[0].1)
            .chain(stairs.windows(2).map(|w| w[1].1 - w[0].1))
            .collect();
        let smallest = risers
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((8..12).contains(&smallest), "smallest riser at {smallest}");
        assert!(risers[9] < risers[0]);
        assert!(risers[9] < risers[19]);

        // the staircase stays within one riser of the continuous schedule
        let sched_fine = LocalAdiabaticSchedule::new(32.0, 0.5).unwrap();
        let max_riser = risers.iter().fold(0.0_f64, |m, &r| m.max(r));
        let dt = sched_fine.total_time() / 20.0;
        let mut worst_gap = 0.0_f64;
        for j in 1..=20 {
            let s_j = stairs[j - 1].1;
            for k in 0..=10 {
                let t = (j as f64 - 1.0 + k as f64 / 10.0) * dt;
                let s_cont = sched_fine.s_of_t(t.min(sched_fine.total_time())).unwrap();
                worst_gap = worst_gap.max((s_j - s_cont).abs());
            }
        }
        assert!(
            worst_gap <= max_riser + 1e-12,
            "staircase deviates {worst_gap} > max riser {max_riser}"
        );
    }

    #[test]
    fn bound_arithmetic_and_monotonicity() {
        // T = 2, R = 4 gives sqrt(2 * 0.5) = 1
        let mut sched = LocalAdiabaticSchedule::new(4.0, 0.1).unwrap();
        sched.total_time = 2.0;
        assert_abs_diff_eq!(staircase_error_bound(&sched, 4).unwrap(), 1.0, epsilon = 1e-15);
        let mut last = f64::INFINITY;
        for r in [1, 2, 4, 8, 16] {
            let b = staircase_error_bound(&sched, r).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LocalAdiabaticSchedule::new(1.0, 0.1).is_err());
        assert!(LocalAdiabaticSchedule::new(16.0, 0.0).is_err());
        assert!(LocalAdiabaticSchedule::new(16.0, 1.0).is_err());
        let sched = LocalAdiabaticSchedule::new(16.0, 0.1).unwrap();
        assert!(sched.t_of_s(1.5).is_err());
        assert!(sched.staircase(0).is_err());
    }
}
