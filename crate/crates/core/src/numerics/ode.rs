//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
//! event localization.
//!
//! The integrator supports forward and backward time, records every accepted
//! step, and localizes the first sign change of an event function by
//! bisection, re-integrating from the last accepted state rather than
//! interpolating (blow-up events are far outside the reach of polynomial
//! interpolants).

use crate::error::{Error, Result};
use crate::tolerances;

/// Scalar event function whose first sign change stops the integration.
pub type EventFn<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

/// Right-hand side of a first-order ODE system y' = f(t, y).
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.1)(t, y, dy)
    }
}

/// An accepted integration point.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub y: Vec<f64>,
}

/// Result of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Set when integration stopped at a localized event instead of t_end.
    pub event: Option<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.event.as_ref().unwrap_or_else(|| {
            self.samples.last().expect("trajectory holds at least the initial sample")
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Event localization tolerance in t.
    pub event_t_tol: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rel_tol: tolerances::ODE_REL_TOL,
            abs_tol: tolerances::ODE_ABS_TOL,
            max_steps: 1_000_000,
            event_t_tol: tolerances::EVENT_T_TOL,
        }
    }
}

impl Integrator {
    pub fn with_tols(rel_tol: f64, abs_tol: f64) -> Self {
        Integrator {
            rel_tol,
            abs_tol,
            ..Integrator::default()
        }
    }

    /// Integrate from (t0, y0) to t_end, recording accepted steps.
    pub fn integrate(
        &self,
        sys: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_end: f64,
    ) -> Result<Trajectory> {
        self.integrate_with_event(sys, t0, y0, t_end, None)
    }

    /// Integrate until t_end or until `event` changes sign from its initial
    /// sign, whichever comes first. The event time is bisected down to
    /// `event_t_tol` and reported in `Trajectory::event`.
    pub fn integrate_with_event(
        &self,
        sys: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        event: Option<EventFn<'_>>,
    ) -> Result<Trajectory> {
        let dim = sys.dim();
        assert_eq!(y0.len(), dim, "initial state dimension mismatch");
        if t_end == t0 {
            return Ok(Trajectory {
                samples: vec![Sample { t: t0, y: y0.to_vec() }],
                event: None,
            });
        }
        let dir = (t_end - t0).signum();
        let span = (t_end - t0).abs();
        let mut h = dir * (span / 100.0).clamp(1e-10, 0.1);

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; dim];
        sys.eval(t, &y, &mut k1);

        let mut samples = vec![Sample { t, y: y.clone() }];
        // Baseline event sign. A zero initial value (point-type initial
        // conditions) adopts the first nonzero sign without triggering.
        let mut ev_sign: i8 = event.map_or(0, |f| sign_of(f(t, &y)));

        let mut stages = Stages::new(dim);
        for _ in 0..self.max_steps {
            if dir * (t + h - t_end) > 0.0 {
                h = t_end - t;
            }
            let (y_new, err, k_new) = self.dp_step(sys, t, &y, &k1, h, &mut stages);
            if err <= 1.0 {
                let t_new = t + h;
                // Event check on the accepted step.
                if let Some(f) = event {
                    let v = f(t_new, &y_new);
                    if ev_sign == 0 {
                        ev_sign = sign_of(v);
                    } else if sign_of(v) != ev_sign && v.is_finite() {
                        let hit = self.locate_event(sys, t, &y, t_new, f, ev_sign)?;
                        samples.push(hit.clone());
                        return Ok(Trajectory { samples, event: Some(hit) });
                    }
                }
                t = t_new;
                y = y_new;
                k1 = k_new;
                samples.push(Sample { t, y: y.clone() });
                if (t - t_end).abs() < 1e-14 * (1.0 + t_end.abs()) || dir * (t - t_end) >= 0.0 {
                    return Ok(Trajectory { samples, event: None });
                }
            }
            // PI-free step controller with safety factor and clamps.
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
            if h.abs() < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Integrator {
                    t,
                    reason: "step size underflow".to_string(),
                });
            }
        }
        Err(Error::Integrator {
            t,
            reason: format!("exceeded {} steps", self.max_steps),
        })
    }

    /// Bisect the event crossing inside (t_lo, t_hi], re-integrating from the
    /// accepted state at t_lo.
    fn locate_event(
        &self,
        sys: &dyn OdeSystem,
        t_lo: f64,
        y_lo: &[f64],
        t_hi: f64,
        f: &dyn Fn(f64, &[f64]) -> f64,
        sign0: i8,
    ) -> Result<Sample> {
        let mut lo = t_lo;
        let mut hi = t_hi;
        let mut y_at_lo = y_lo.to_vec();
        while (hi - lo).abs() > self.event_t_tol {
            let mid = 0.5 * (lo + hi);
            let traj = self.integrate(sys, lo, &y_at_lo, mid)?;
            let s = traj.last();
            if sign_of(f(s.t, &s.y)) != sign0 {
                hi = mid;
            } else {
                y_at_lo = s.y.clone();
                lo = mid;
            }
        }
        let traj = self.integrate(sys, lo, &y_at_lo, hi)?;
        let s = traj.last().clone();
        Ok(Sample { t: hi, y: s.y })
    }

    /// One Dormand-Prince 5(4) step; returns (y_new, scaled_error, k7).
    fn dp_step(
        &self,
        sys: &dyn OdeSystem,
        t: f64,
        y: &[f64],
        k1: &[f64],
        h: f64,
        st: &mut Stages,
    ) -> (Vec<f64>, f64, Vec<f64>) {
        let dim = y.len();
        let a21 = 1.0 / 5.0;
        let (a31, a32) = (3.0 / 40.0, 9.0 / 40.0);
        let (a41, a42, a43) = (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0);
        let (a51, a52, a53, a54) = (
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
        );
        let (a61, a62, a63, a64, a65) = (
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        );
        let (b1, b3, b4, b5, b6) = (
            35.0 / 384.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        );
        // Embedded 4th-order weights.
        let (e1, e3, e4, e5, e6, e7) = (
            5179.0 / 57600.0,
            7571.0 / 16695.0,
            393.0 / 640.0,
            -92097.0 / 339200.0,
            187.0 / 2100.0,
            1.0 / 40.0,
        );

        for i in 0..dim {
            st.ytmp[i] = y[i] + h * a21 * k1[i];
        }
        sys.eval(t + 0.2 * h, &st.ytmp, &mut st.k2);
        for i in 0..dim {
            st.ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * st.k2[i]);
        }
        sys.eval(t + 0.3 * h, &st.ytmp, &mut st.k3);
        for i in 0..dim {
            st.ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * st.k2[i] + a43 * st.k3[i]);
        }
        sys.eval(t + 0.8 * h, &st.ytmp, &mut st.k4);
        for i in 0..dim {
            st.ytmp[i] =
                y[i] + h * (a51 * k1[i] + a52 * st.k2[i] + a53 * st.k3[i] + a54 * st.k4[i]);
        }
        sys.eval(t + 8.0 / 9.0 * h, &st.ytmp, &mut st.k5);
        for i in 0..dim {
            st.ytmp[i] = y[i]
                + h * (a61 * k1[i]
                    + a62 * st.k2[i]
                    + a63 * st.k3[i]
                    + a64 * st.k4[i]
                    + a65 * st.k5[i]);
        }
        sys.eval(t + h, &st.ytmp, &mut st.k6);
        let mut y_new = vec![0.0; dim];
        for i in 0..dim {
            y_new[i] = y[i]
                + h * (b1 * k1[i] + b3 * st.k3[i] + b4 * st.k4[i] + b5 * st.k5[i] + b6 * st.k6[i]);
        }
        let mut k7 = vec![0.0; dim];
        sys.eval(t + h, &y_new, &mut k7);

        let mut err_sq = 0.0;
        for i in 0..dim {
            let y4 = y[i]
                + h * (e1 * k1[i]
                    + e3 * st.k3[i]
                    + e4 * st.k4[i]
                    + e5 * st.k5[i]
                    + e6 * st.k6[i]
                    + e7 * k7[i]);
            let scale = self.abs_tol + self.rel_tol * y_new[i].abs().max(y[i].abs());
            let d = (y_new[i] - y4) / scale;
            err_sq += d * d;
        }
        let err = (err_sq / dim as f64).sqrt();
        let err = if err.is_finite() { err } else { f64::MAX };
        (y_new, err, k7)
    }
}

struct Stages {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    k5: Vec<f64>,
    k6: Vec<f64>,
    ytmp: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Stages {
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            k5: vec![0.0; dim],
            k6: vec![0.0; dim],
            ytmp: vec![0.0; dim],
        }
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
