//! Scalar and matrix Riccati integration with blow-up detection and
//! comparison verdicts.
//!
//! The engine integrates S' + S^2 + R = 0 for a symmetric operator S on a
//! dim-dimensional space (dim is independent of any spacetime dimension;
//! geometric callers pass dim = n - 1). A trajectory ends at its horizon or
//! at a blow-up: a crossing of the trace threshold, localized by bisection.
//! The scalar equation is the dim = 1 case and shares the exact step
//! sequence of the matrix path.

use crate::error::{Error, Result};
use crate::model::s_kappa;
use crate::numerics::ode::{Integrator, OdeSystem};
use crate::tolerances;
use nalgebra::DMatrix;

/// One sample of a Riccati trajectory.
#[derive(Debug, Clone)]
pub struct RiccatiState {
    pub t: f64,
    /// Shape-operator value; symmetric.
    pub s: DMatrix<f64>,
    pub trace: f64,
}

impl RiccatiState {
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowUpSign {
    PlusInfinity,
    MinusInfinity,
    None,
}

/// A Riccati trajectory with blow-up diagnostics.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub samples: Vec<RiccatiState>,
    /// R evaluated at the sample times (used by rigidity checks).
    pub curvature_samples: Vec<DMatrix<f64>>,
    /// Threshold-crossing time when the trajectory blew up.
    pub blow_up_time: Option<f64>,
    pub blow_up_sign: BlowUpSign,
}

impl RiccatiSolution {
    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.dim())
    }

    pub fn last(&self) -> &RiccatiState {
        self.samples.last().expect("solution holds at least one state")
    }

    /// CSV rows (t, trace, margin) against the scalar comparison solution.
    pub fn to_csv(&self, kappa: f64) -> String {
        let n = self.dim() as f64;
        let mut out = String::from("t,trace,margin\n");
        for st in &self.samples {
            let margin = match s_kappa(kappa, st.t) {
                Ok(s) => n * s - st.trace,
                Err(_) => f64::NAN,
            };
            out.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", st.t, st.trace, margin));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Direction {
    Forward,
    Backward,
}

/// Initial data for the matrix equation.
pub enum MatrixInit {
    /// Start from a concrete symmetric value at t0.
    Value { t0: f64, s0: DMatrix<f64> },
    /// Proxy for the t -> 0+ asymptotic condition: start at t_start with
    /// S = (s_kappa(t_start) - epsilon0) Id, epsilon0 >= 0.
    Asymptotic {
        kappa: f64,
        epsilon0: f64,
        t_start: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct RiccatiOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub blowup_threshold: f64,
    pub event_t_tol: f64,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions {
            rel_tol: tolerances::ODE_REL_TOL,
            abs_tol: tolerances::ODE_ABS_TOL,
            blowup_threshold: tolerances::BLOWUP_THRESHOLD,
            event_t_tol: tolerances::EVENT_T_TOL,
        }
    }
}

/// Integrate the scalar equation s' + s^2 + kappa = 0 from s(t0) = s0.
pub fn integrate_scalar(
    kappa: f64,
    t0: f64,
    s0: f64,
    direction: Direction,
    horizon: f64,
    opts: RiccatiOptions,
) -> Result<RiccatiSolution> {
    let ok = match direction {
        Direction::Forward => horizon > t0,
        Direction::Backward => horizon < t0,
    };
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is not beyond t0 = {t0} in the chosen direction"
        )));
    }
    let r = move |_t: f64| DMatrix::from_element(1, 1, kappa);
    integrate_matrix_core(&r, 1, t0, DMatrix::from_element(1, 1, s0), horizon, opts)
}

/// Integrate the matrix equation S' + S^2 + R(t) = 0.
pub fn integrate_matrix(
    r: &dyn Fn(f64) -> DMatrix<f64>,
    dim: usize,
    init: MatrixInit,
    horizon: f64,
    opts: RiccatiOptions,
) -> Result<RiccatiSolution> {
    let (t0, s0) = match init {
        MatrixInit::Value { t0, s0 } => {
            if s0.nrows() != dim || s0.ncols() != dim {
                return Err(Error::InvalidParameter(format!(
                    "initial matrix is {}x{}, expected {dim}x{dim}",
                    s0.nrows(),
                    s0.ncols()
                )));
            }
            check_symmetric(&s0, "initial value")?;
            (t0, s0)
        }
        MatrixInit::Asymptotic {
            kappa,
            epsilon0,
            t_start,
        } => {
            if epsilon0 < 0.0 {
                return Err(Error::InvalidParameter(
                    "asymptotic offset epsilon0 must be >= 0".to_string(),
                ));
            }
            if t_start <= 0.0 {
                return Err(Error::InvalidParameter(
                    "asymptotic start time must be positive".to_string(),
                ));
            }
            let s = s_kappa(kappa, t_start)? - epsilon0;
            (t_start, DMatrix::from_diagonal_element(dim, dim, s))
        }
    };
    integrate_matrix_core(r, dim, t0, s0, horizon, opts)
}

struct RiccatiRhs<'a> {
    r: &'a dyn Fn(f64) -> DMatrix<f64>,
    dim: usize,
}

impl OdeSystem for RiccatiRhs<'_> {
    fn dim(&self) -> usize {
        self.dim * self.dim
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let d = self.dim;
        let s = DMatrix::from_column_slice(d, d, y);
        let rhs = -(&s * &s) - (self.r)(t);
        dy.copy_from_slice(rhs.as_slice());
    }
}

fn integrate_matrix_core(
    r: &dyn Fn(f64) -> DMatrix<f64>,
    dim: usize,
    t0: f64,
    s0: DMatrix<f64>,
    horizon: f64,
    opts: RiccatiOptions,
) -> Result<RiccatiSolution> {
    check_symmetric(&r(t0), "curvature sample")?;
    let sys = RiccatiRhs { r, dim };
    let integrator = Integrator {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        event_t_tol: opts.event_t_tol,
        ..Integrator::default()
    };
    let threshold = opts.blowup_threshold;
    let event = move |_t: f64, y: &[f64]| {
        let tr: f64 = (0..dim).map(|i| y[i * dim + i]).sum();
        threshold - tr.abs()
    };
    let traj = integrator.integrate_with_event(&sys, t0, s0.as_slice(), horizon, Some(&event))?;

    let mut samples = Vec::with_capacity(traj.samples.len());
    let mut curvature_samples = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let m = DMatrix::from_column_slice(dim, dim, &s.y);
        let rm = r(s.t);
        check_symmetric(&rm, "curvature sample")?;
        let trace = m.trace();
        samples.push(RiccatiState { t: s.t, s: m, trace });
        curvature_samples.push(rm);
    }
    let (blow_up_time, blow_up_sign) = match traj.event {
        Some(hit) => {
            let tr: f64 = (0..dim).map(|i| hit.y[i * dim + i]).sum();
            (
                Some(hit.t),
                if tr > 0.0 {
                    BlowUpSign::PlusInfinity
                } else {
                    BlowUpSign::MinusInfinity
                },
            )
        }
        None => (None, BlowUpSign::None),
    };
    Ok(RiccatiSolution {
        samples,
        curvature_samples,
        blow_up_time,
        blow_up_sign,
    })
}

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let asym = (m - m.transpose()).abs().max();
    if asym > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "{what} is not symmetric (asymmetry {asym:.3e})"
        )));
    }
    Ok(())
}

/// Verdict of a trajectory against the trace comparison bound
/// tr S(t) <= dim * s_kappa(t).
#[derive(Debug, Clone)]
pub struct ComparisonVerdict {
    pub holds: bool,
    /// (t, dim * s_kappa(t) - tr S(t)) per sample with t > 0.
    pub margins: Vec<(f64, f64)>,
    /// Sample times where the margin is below the equality tolerance.
    pub equality_times: Vec<f64>,
    /// Equality at t0 propagated to every earlier sample.
    pub propagation_ok: bool,
    /// At every equality time, S = s_kappa Id and R = kappa Id held.
    pub rigidity_confirmed: bool,
    pub first_violation: Option<f64>,
}

/// Analyze a trajectory against the scalar comparison solution for `kappa`.
pub fn comparison_verdict(solution: &RiccatiSolution, kappa: f64) -> ComparisonVerdict {
    let dim = solution.dim();
    let n = dim as f64;
    let tol = tolerances::EQUALITY_TOL;
    let mut margins = Vec::new();
    let mut equality = vec![false; solution.samples.len()];
    let mut holds = true;
    let mut first_violation = None;
    let mut rigidity_confirmed = true;

    for (i, st) in solution.samples.iter().enumerate() {
        if st.t <= 0.0 {
            continue;
        }
        let margin = match s_kappa(kappa, st.t) {
            Ok(s) => n * s - st.trace,
            // Past the comparison pole the bound cannot hold.
            Err(_) => f64::NEG_INFINITY,
        };
        margins.push((st.t, margin));
        let scale = st.trace.abs().max(1.0);
        if margin < -tol * scale {
            holds = false;
            if first_violation.is_none() {
                first_violation = Some(st.t);
            }
        }
        if margin.abs() <= tol * scale {
            equality[i] = true;
            let s_val = s_kappa(kappa, st.t).unwrap_or(f64::NAN);
            let dev_s = (&st.s - DMatrix::from_diagonal_element(dim, dim, s_val))
                .abs()
                .max();
            let dev_r = (&solution.curvature_samples[i]
                - DMatrix::from_diagonal_element(dim, dim, kappa))
            .abs()
            .max();
            if dev_s > tol * scale || dev_r > tol * scale {
                rigidity_confirmed = false;
            }
        }
    }

    // Equality at some time must hold at all earlier positive times.
    let mut propagation_ok = true;
    if let Some(last_eq) = equality.iter().rposition(|&e| e) {
        for (i, st) in solution.samples.iter().enumerate().take(last_eq) {
            if st.t > 0.0 && !equality[i] {
                propagation_ok = false;
                break;
            }
        }
    }
    let any_equality = equality.iter().any(|&e| e);

    ComparisonVerdict {
        holds,
        margins,
        equality_times: solution
            .samples
            .iter()
            .zip(&equality)
            .filter(|(_, &e)| e)
            .map(|(s, _)| s.t)
            .collect(),
        propagation_ok,
        rigidity_confirmed: rigidity_confirmed && any_equality,
        first_violation,
    }
}

/// Seeded random positive semidefinite matrix Q diag(u) Q^T with Q a random
/// orthogonal factor and u uniform on [0, 1].
pub fn random_psd(dim: usize, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    let normal = |rng: &mut dyn rand::RngCore| -> f64 {
        // Box-Muller from two uniforms.
        let u1: f64 = loop {
            let v = rand::Rng::random::<f64>(rng);
            if v > 0.0 {
                break v;
            }
        };
        let u2: f64 = rand::Rng::random(rng);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let g = DMatrix::from_fn(dim, dim, |_, _| normal(rng));
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| {
        rng.random::<f64>()
    }));
    &q * d * q.transpose()
}
