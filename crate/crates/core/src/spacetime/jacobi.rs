//! Jacobi propagators along unit-speed timelike geodesics.
//!
//! In a parallel frame adapted to a GRW geodesic (one leg in the plane
//! spanned by d/dt and the fiber direction, the rest orthogonal fiber
//! directions) the tidal operator R(. , gamma') gamma' is diagonal:
//!
//!   radial     -f''/f
//!   tangential -(1 + b^2) f''/f + b^2 (k + f'^2)/f^2,   b^2 = (f sigma')^2
//!
//! so the Jacobi system J'' + R J = 0 closes over the geodesic reduction.
//! Every comparison-space row satisfies kappa f^2 + f'^2 + k = 0, which makes
//! both eigenvalues equal to kappa there: the models are the isotropic case.

use super::geodesic::GeodesicTrace;
use super::{Hypersurface, Point, Spacetime};
use crate::error::{Error, Result};
use crate::numerics::ode::{Integrator, OdeSystem};
use crate::numerics::roots;
use crate::tolerances;
use nalgebra::{DMatrix, DVector};

/// Initial data of a unit-speed timelike geodesic in reduced form.
#[derive(Debug, Clone)]
pub struct PropagatorStart {
    pub x0: DVector<f64>,
    pub fiber_dir: Option<DVector<f64>>,
    pub t0: f64,
    pub tp0: f64,
    pub sigmap0: f64,
}

impl PropagatorStart {
    /// Vertical future unit normal at (t0, x0).
    pub fn vertical(t0: f64, x0: DVector<f64>) -> Self {
        PropagatorStart {
            x0,
            fiber_dir: None,
            t0,
            tp0: 1.0,
            sigmap0: 0.0,
        }
    }

    /// Start data read off an integrated geodesic trace at parameter s.
    pub fn from_trace(trace: &GeodesicTrace, s: f64) -> Self {
        let r = trace.reduced_at(s);
        let (x, dir) = match &trace.fiber_dir {
            None => (trace.fiber_point(r.sigma), None),
            Some(u) => {
                let (x, v) = trace.fiber.flow(&trace.x0, u, r.sigma);
                (x, Some(v))
            }
        };
        PropagatorStart {
            x0: x,
            fiber_dir: dir,
            t0: r.t,
            tp0: r.tp,
            sigmap0: r.sigmap,
        }
    }
}

/// Initial conditions of the Jacobi propagator.
#[derive(Debug, Clone)]
pub enum SigmaInit {
    /// J = Id, J' = (f'/f)(t0) Id: level flow of a slice.
    Slice,
    /// J = 0, J' = Id: spheres around a point.
    Point,
    /// Arbitrary symmetric data in the adapted frame.
    Custom { j0: DMatrix<f64>, jp0: DMatrix<f64> },
}

/// State of the propagator at its stopping parameter.
#[derive(Debug, Clone)]
pub struct JacobiOutcome {
    pub s: f64,
    pub t: f64,
    pub j: DMatrix<f64>,
    pub jp: DMatrix<f64>,
    pub det: f64,
    pub exited_domain: bool,
    pub det_zero: bool,
}

impl JacobiOutcome {
    /// Shape operator J' J^{-1} of the transported flow.
    pub fn shape(&self) -> Result<DMatrix<f64>> {
        let inv = self
            .j
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NonConvergence("Jacobi propagator is singular".to_string()))?;
        Ok(&self.jp * inv)
    }

    pub fn shape_trace(&self) -> Result<f64> {
        Ok(self.shape()?.trace())
    }
}

/// First focal parameter along a hypersurface normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FocalOutcome {
    /// det J vanishes at this parameter.
    Focal(f64),
    /// No focal point up to the horizon parameter.
    Horizon(f64),
    /// The geodesic left the t-interval at this parameter first.
    Truncated(f64),
}

struct JacobiRhs<'a> {
    st: &'a Spacetime,
    d: usize,
}

impl JacobiRhs<'_> {
    fn tidal(&self, t: f64, b2: f64) -> (f64, f64) {
        let f = self.st.f(t);
        let fp = self.st.df(t);
        let fpp = self.st.ddf(t);
        let k = self.st.fiber.curvature as f64;
        let radial = -fpp / f;
        let tangential = -(1.0 + b2) * fpp / f + b2 * (k + fp * fp) / (f * f);
        (radial, tangential)
    }
}

impl OdeSystem for JacobiRhs<'_> {
    fn dim(&self) -> usize {
        4 + 2 * self.d * self.d
    }
    fn eval(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
        let d = self.d;
        let (t, tp, _sigma, sigmap) = (y[0], y[1], y[2], y[3]);
        let f = self.st.f(t);
        let fp = self.st.df(t);
        dy[0] = tp;
        dy[1] = -f * fp * sigmap * sigmap;
        dy[2] = sigmap;
        dy[3] = -2.0 * (fp / f) * tp * sigmap;

        let b2 = (f * sigmap).powi(2);
        let (r_rad, r_tan) = self.tidal(t, b2);
        let j = &y[4..4 + d * d];
        let jp = &y[4 + d * d..];
        let (dj, djp) = dy[4..].split_at_mut(d * d);
        dj.copy_from_slice(jp);
        // Column-major layout: entry (i, j) at j*d + i; the tidal operator is
        // diagonal with eigenvalue r_rad on frame row 0.
        for col in 0..d {
            for row in 0..d {
                let r = if row == 0 { r_rad } else { r_tan };
                djp[col * d + row] = -r * j[col * d + row];
            }
        }
    }
}

fn det_of(y: &[f64], d: usize) -> f64 {
    DMatrix::from_column_slice(d, d, &y[4..4 + d * d]).determinant()
}

impl Spacetime {
    fn jacobi_initial(&self, start: &PropagatorStart, init: &SigmaInit) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.fiber.dim;
        match init {
            SigmaInit::Slice => (
                DMatrix::identity(d, d),
                DMatrix::identity(d, d) * (self.df(start.t0) / self.f(start.t0)),
            ),
            SigmaInit::Point => (DMatrix::zeros(d, d), DMatrix::identity(d, d)),
            SigmaInit::Custom { j0, jp0 } => (j0.clone(), jp0.clone()),
        }
    }

    /// Propagate the Jacobi system to parameter s_target (or until the
    /// geodesic leaves the t-interval, or det J crosses zero when requested).
    pub fn propagate_jacobi(
        &self,
        start: &PropagatorStart,
        init: &SigmaInit,
        s_target: f64,
        detect_det_zero: bool,
    ) -> Result<JacobiOutcome> {
        let d = self.fiber.dim;
        let (j0, jp0) = self.jacobi_initial(start, init);
        let mut y0 = vec![0.0; 4 + 2 * d * d];
        y0[0] = start.t0;
        y0[1] = start.tp0;
        y0[2] = 0.0;
        y0[3] = start.sigmap0;
        y0[4..4 + d * d].copy_from_slice(j0.as_slice());
        y0[4 + d * d..].copy_from_slice(jp0.as_slice());

        let margin = tolerances::DOMAIN_MARGIN;
        let lo = self.t_min + margin;
        let hi = self.t_max - margin;
        let det0 = det_of(&y0, d);
        // Point-type initial conditions start at det = 0 and become positive.
        let det_sign0 = if det0 == 0.0 { 1.0 } else { det0.signum() };
        let event = move |_s: f64, y: &[f64]| {
            let domain = (y[0] - lo).min(hi - y[0]);
            if detect_det_zero {
                domain.min(det_sign0 * det_of(y, d))
            } else {
                domain
            }
        };
        let sys = JacobiRhs { st: self, d };
        let traj = Integrator::default().integrate_with_event(&sys, 0.0, &y0, s_target, Some(&event))?;

        let last = traj.last();
        let j = DMatrix::from_column_slice(d, d, &last.y[4..4 + d * d]);
        let jp = DMatrix::from_column_slice(d, d, &last.y[4 + d * d..]);
        let det = j.determinant();
        let stopped_early = traj.event.is_some();
        let t_end = last.y[0];
        let domain_val = (t_end - lo).min(hi - t_end);
        let exited_domain = stopped_early && domain_val <= 1e-7 * (1.0 + t_end.abs());
        let det_zero = stopped_early && !exited_domain && detect_det_zero;
        Ok(JacobiOutcome {
            s: last.t,
            t: t_end,
            j,
            jp,
            det,
            exited_domain,
            det_zero,
        })
    }

    /// Propagate and record outcomes at each grid parameter (strictly
    /// increasing, starting after 0).
    pub fn propagate_jacobi_grid(
        &self,
        start: &PropagatorStart,
        init: &SigmaInit,
        s_grid: &[f64],
    ) -> Result<Vec<JacobiOutcome>> {
        let d = self.fiber.dim;
        let (j0, jp0) = self.jacobi_initial(start, init);
        let mut y = vec![0.0; 4 + 2 * d * d];
        y[0] = start.t0;
        y[1] = start.tp0;
        y[2] = 0.0;
        y[3] = start.sigmap0;
        y[4..4 + d * d].copy_from_slice(j0.as_slice());
        y[4 + d * d..].copy_from_slice(jp0.as_slice());

        let sys = JacobiRhs { st: self, d };
        let integrator = Integrator::default();
        let mut outcomes = Vec::with_capacity(s_grid.len());
        let mut s_prev = 0.0;
        for &s in s_grid {
            if s <= s_prev {
                return Err(Error::InvalidParameter(
                    "jacobi grid must be strictly increasing".to_string(),
                ));
            }
            let traj = integrator.integrate(&sys, s_prev, &y, s)?;
            y = traj.last().y.clone();
            s_prev = s;
            let j = DMatrix::from_column_slice(d, d, &y[4..4 + d * d]);
            let jp = DMatrix::from_column_slice(d, d, &y[4 + d * d..]);
            let det = j.determinant();
            outcomes.push(JacobiOutcome {
                s,
                t: y[0],
                j,
                jp,
                det,
                exited_domain: false,
                det_zero: false,
            });
        }
        Ok(outcomes)
    }

    /// tr(J' J^{-1}) at parameter s along a unit-speed timelike geodesic with
    /// point initial conditions: the mean curvature of the distance sphere.
    pub fn point_shape_trace(&self, start: &PropagatorStart, s: f64) -> Result<f64> {
        let out = self.propagate_jacobi(start, &SigmaInit::Point, s, false)?;
        if out.exited_domain {
            return Err(Error::DomainExit(out.t));
        }
        out.shape_trace()
    }

    /// First focal parameter along the future unit normal of Sigma at p.
    ///
    /// The focal parameter is the first zero of det J with Sigma-adapted
    /// initial conditions. When the warp itself vanishes at the interval end
    /// the zero sits exactly on the boundary; for vertical normals it is then
    /// located as the first zero of f.
    pub fn jacobi_focal_time(&self, sigma: &Hypersurface, p: &Point) -> Result<FocalOutcome> {
        let (start, init) = self.sigma_normal_data(sigma, p)?;
        let s_max = self.t_max - start.t0; // unit-speed future: t advances at least as fast as s
        let out = self.propagate_jacobi(&start, &init, s_max, true)?;
        if out.det_zero {
            return Ok(FocalOutcome::Focal(out.s));
        }
        if out.exited_domain {
            // Boundary-degenerate focal point: the slice propagator is
            // proportional to f(t0 + s)/f(t0), so det J -> 0 exactly where f
            // vanishes.
            let t_last = out.t;
            let probe = self.f(t_last);
            let beyond = self.f(self.t_max + 10.0 * tolerances::DOMAIN_MARGIN);
            let vanishing = probe * beyond <= 0.0 || beyond.abs() < probe.abs() * 1e-3;
            if vanishing {
                if start.sigmap0 == 0.0 {
                    if let Ok(t_zero) =
                        roots::bisect(&|t| self.f(t), t_last, self.t_max + 1.0, 1e-12)
                    {
                        return Ok(FocalOutcome::Focal(t_zero - start.t0));
                    }
                }
                return Ok(FocalOutcome::Truncated(out.s));
            }
            // A future normal reaching the interval's top with f bounded away
            // from zero has simply run out of horizon.
            return Ok(FocalOutcome::Horizon(out.s));
        }
        Ok(FocalOutcome::Horizon(out.s))
    }

    /// Future unit normal of Sigma at p as propagator start data, plus the
    /// Sigma-adapted Jacobi initial conditions in the parallel frame.
    pub(crate) fn sigma_normal_data(
        &self,
        sigma: &Hypersurface,
        p: &Point,
    ) -> Result<(PropagatorStart, SigmaInit)> {
        let height = sigma.height(&p.x);
        if (height - p.t).abs() > 1e-8 * (1.0 + p.t.abs()) {
            return Err(Error::Precondition(format!(
                "point t = {} is not on the hypersurface (height {height})",
                p.t
            )));
        }
        match sigma {
            Hypersurface::Slice(t0) => {
                Ok((PropagatorStart::vertical(*t0, p.x.clone()), SigmaInit::Slice))
            }
            Hypersurface::Graph(_) => {
                let shape = self.shape_operator(sigma, p)?;
                let normal = self.graph_normal(sigma, &p.x)?;
                let f = self.f(p.t);
                let speed = self.fiber.norm(&p.x, &normal.dx);
                let fiber_dir = if speed * f.abs() < 1e-10 {
                    None
                } else {
                    Some(self.fiber.unit(&p.x, &normal.dx))
                };
                // Shape operator expressed in the parallel adapted frame: the
                // frame's fiber parts expanded in the chart basis of T Sigma.
                let frame_change = self.adapted_frame_in_chart(p, fiber_dir.as_ref(), normal.dt)?;
                let c_inv = frame_change.clone().try_inverse().ok_or_else(|| {
                    Error::NonConvergence("adapted frame is degenerate".to_string())
                })?;
                let s_frame = &c_inv * &shape.matrix * &frame_change;
                let d = self.fiber.dim;
                Ok((
                    PropagatorStart {
                        x0: p.x.clone(),
                        fiber_dir,
                        t0: p.t,
                        tp0: normal.dt,
                        sigmap0: speed,
                    },
                    SigmaInit::Custom {
                        j0: DMatrix::identity(d, d),
                        jp0: s_frame,
                    },
                ))
            }
        }
    }

    /// Chart components of the adapted frame vectors, as columns. The first
    /// frame vector is the boost partner of the normal and has fiber part
    /// (dt/f) times the fiber direction; the rest are h-orthonormal fiber
    /// directions scaled by 1/f.
    fn adapted_frame_in_chart(
        &self,
        p: &Point,
        fiber_dir: Option<&DVector<f64>>,
        normal_dt: f64,
    ) -> Result<DMatrix<f64>> {
        let d = self.fiber.dim;
        let h = self.fiber.metric(&p.x);
        let f = self.f(p.t).abs();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
        if let Some(dir) = fiber_dir {
            basis.push(dir.clone());
        }
        for i in 0..d {
            if basis.len() == d {
                break;
            }
            let mut cand = DVector::zeros(d);
            cand[i] = 1.0;
            for b in &basis {
                let proj = (cand.transpose() * &h * b)[(0, 0)];
                cand -= b * proj;
            }
            let norm = ((cand.transpose() * &h * &cand)[(0, 0)]).max(0.0).sqrt();
            if norm > 1e-8 {
                basis.push(cand / norm);
            }
        }
        if basis.len() != d {
            return Err(Error::NonConvergence(
                "failed to build an adapted fiber frame".to_string(),
            ));
        }
        let mut c = DMatrix::zeros(d, d);
        for (a, b) in basis.iter().enumerate() {
            let scale = if a == 0 && fiber_dir.is_some() {
                normal_dt / f
            } else {
                1.0 / f
            };
            for i in 0..d {
                c[(i, a)] = scale * b[i];
            }
        }
        Ok(c)
    }
}
