//! Geodesic integration via the warped-product reduction.
//!
//! A geodesic projects to a fixed unit-speed fiber geodesic traversed at
//! rate sigma(s); the remaining system is
//!
//! ```text
//! t''     = -f(t) f'(t) sigma'^2
//! sigma'' = -2 (f'/f)(t) t' sigma'
//! ```
//!
//! integrated without substituting the conserved quantities, so that energy
//! and angular-momentum drift are genuine integrator diagnostics.

use super::{Point, Spacetime, Tangent};
use crate::error::{Error, Result};
use crate::fiber::SpaceForm;
use crate::numerics::ode::{Integrator, OdeSystem};
use crate::tolerances;
use nalgebra::DVector;

/// Reduced state at one affine-parameter sample.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSample {
    pub s: f64,
    pub t: f64,
    pub tp: f64,
    pub sigma: f64,
    pub sigmap: f64,
}

/// One exported sample of a geodesic.
#[derive(Debug, Clone)]
pub struct GeodesicSample {
    pub s: f64,
    pub point: Point,
    pub tangent: Tangent,
}

/// A sampled causal geodesic with its conserved quantities.
#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    pub(crate) fiber: SpaceForm,
    pub(crate) x0: DVector<f64>,
    /// Unit fiber direction; None for vertical geodesics.
    pub(crate) fiber_dir: Option<DVector<f64>>,
    pub(crate) reduced: Vec<ReducedSample>,
    /// g(gamma', gamma') at the start.
    pub energy: f64,
    /// f^2 sigma' at the start.
    pub angular_momentum: f64,
    /// Lorentzian arc length of the integrated span.
    pub length: f64,
    /// Worst relative drift of the energy over the samples.
    pub energy_drift: f64,
    /// Worst relative drift of f^2 sigma' over the samples.
    pub angular_momentum_drift: f64,
    /// True when the geodesic stopped early at the t-interval boundary.
    pub truncated: bool,
}

impl GeodesicTrace {
    pub fn span(&self) -> f64 {
        self.reduced.last().map_or(0.0, |r| r.s)
    }

    pub fn fiber_point(&self, sigma: f64) -> DVector<f64> {
        match &self.fiber_dir {
            None => self.x0.clone(),
            Some(u) => self.fiber.flow(&self.x0, u, sigma).0,
        }
    }

    /// Point at affine parameter s by cubic Hermite interpolation of the
    /// reduced state between samples.
    pub fn point_at(&self, s: f64) -> Point {
        let r = self.reduced_at(s);
        Point::new(r.t, self.fiber_point(r.sigma))
    }

    /// Reduced state at parameter s.
    pub fn reduced_at(&self, s: f64) -> ReducedSample {
        let rs = &self.reduced;
        if s <= rs[0].s {
            return rs[0];
        }
        if s >= rs[rs.len() - 1].s {
            return rs[rs.len() - 1];
        }
        let idx = rs.partition_point(|r| r.s <= s).saturating_sub(1);
        let (a, b) = (rs[idx], rs[idx + 1]);
        let h = b.s - a.s;
        let u = (s - a.s) / h;
        let hermite = |ya: f64, da: f64, yb: f64, db: f64| {
            let u2 = u * u;
            let u3 = u2 * u;
            ya * (2.0 * u3 - 3.0 * u2 + 1.0)
                + da * h * (u3 - 2.0 * u2 + u)
                + yb * (-2.0 * u3 + 3.0 * u2)
                + db * h * (u3 - u2)
        };
        // Derivatives of t' and sigma' come from the reduction's RHS.
        let lerp = |ya: f64, yb: f64| ya + (yb - ya) * u;
        ReducedSample {
            s,
            t: hermite(a.t, a.tp, b.t, b.tp),
            tp: lerp(a.tp, b.tp),
            sigma: hermite(a.sigma, a.sigmap, b.sigma, b.sigmap),
            sigmap: lerp(a.sigmap, b.sigmap),
        }
    }

    /// End point of the integrated span.
    pub fn end_point(&self) -> Point {
        let r = self.reduced.last().expect("trace is nonempty");
        Point::new(r.t, self.fiber_point(r.sigma))
    }

    /// Initial (dt, dx) velocity.
    pub fn initial_velocity(&self) -> (f64, DVector<f64>) {
        let r = self.reduced[0];
        let dx = match &self.fiber_dir {
            None => DVector::zeros(self.fiber.dim),
            Some(u) => u * r.sigmap,
        };
        (r.tp, dx)
    }

    /// Samples as (s, point, tangent), classified against the spacetime.
    pub fn samples(&self, st: &Spacetime) -> Vec<GeodesicSample> {
        self.reduced
            .iter()
            .map(|r| {
                let x = self.fiber_point(r.sigma);
                let dx = match &self.fiber_dir {
                    None => DVector::zeros(self.fiber.dim),
                    Some(u) => {
                        let (_, v) = self.fiber.flow(&self.x0, u, r.sigma);
                        v * r.sigmap
                    }
                };
                let point = Point::new(r.t, x);
                let tangent = st.tangent(&point, r.tp, dx);
                GeodesicSample {
                    s: r.s,
                    point,
                    tangent,
                }
            })
            .collect()
    }
}

struct ReducedRhs<'a> {
    st: &'a Spacetime,
}

impl OdeSystem for ReducedRhs<'_> {
    fn dim(&self) -> usize {
        4
    }
    fn eval(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
        let (t, tp, _sigma, sigmap) = (y[0], y[1], y[2], y[3]);
        let f = self.st.f(t);
        let fp = self.st.df(t);
        dy[0] = tp;
        dy[1] = -f * fp * sigmap * sigmap;
        dy[2] = sigmap;
        dy[3] = -2.0 * (fp / f) * tp * sigmap;
    }
}

impl Spacetime {
    /// Integrate the geodesic from p with initial velocity v for the given
    /// affine-parameter span. Stops early with a truncation flag when the
    /// trajectory reaches the t-interval boundary.
    pub fn geodesic(&self, p: &Point, v: &Tangent, param_span: f64) -> Result<GeodesicTrace> {
        let speed = self.fiber.norm(&p.x, &v.dx);
        if v.dt == 0.0 && speed == 0.0 {
            return Err(Error::InvalidParameter("zero initial velocity".to_string()));
        }
        if !self.contains_t(p.t) {
            return Err(Error::DomainExit(p.t));
        }
        let fiber_dir = if speed > 0.0 {
            Some(self.fiber.unit(&p.x, &v.dx))
        } else {
            None
        };
        self.integrate_reduced(p.x.clone(), fiber_dir, p.t, v.dt, speed, param_span, None)
    }

    /// Integrate the reduced system, optionally stopping at a fiber-arclength
    /// target (used by the shooting searches).
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn integrate_reduced(
        &self,
        x0: DVector<f64>,
        fiber_dir: Option<DVector<f64>>,
        t0: f64,
        tp0: f64,
        sigmap0: f64,
        param_span: f64,
        stop_at_sigma: Option<f64>,
    ) -> Result<GeodesicTrace> {
        // Conservation diagnostics of the reduction are checked to 1e-9
        // relative; run the geodesic system a notch tighter than the global
        // default.
        let integrator = Integrator::with_tols(1e-11, 1e-13);
        self.integrate_reduced_tol(
            x0,
            fiber_dir,
            t0,
            tp0,
            sigmap0,
            param_span,
            stop_at_sigma,
            integrator,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn integrate_reduced_tol(
        &self,
        x0: DVector<f64>,
        fiber_dir: Option<DVector<f64>>,
        t0: f64,
        tp0: f64,
        sigmap0: f64,
        param_span: f64,
        stop_at_sigma: Option<f64>,
        integrator: Integrator,
    ) -> Result<GeodesicTrace> {
        let margin = tolerances::DOMAIN_MARGIN;
        let lo = self.t_min + margin;
        let hi = self.t_max - margin;
        // Geodesics with fiber motion stiffen like 1/f^2 near a warp zero;
        // stop them at a relative f-floor instead of grinding the step size
        // into underflow. Vertical geodesics are not stiff and may approach
        // the boundary margin itself.
        let f_floor = if sigmap0 != 0.0 {
            1e-4 * self.f(t0).abs()
        } else {
            0.0
        };
        let event = move |_s: f64, y: &[f64]| {
            let domain = (y[0] - lo).min(hi - y[0]);
            let domain = domain.min(self.f(y[0]).abs() - f_floor);
            match stop_at_sigma {
                Some(target) => domain.min(target - y[2]),
                None => domain,
            }
        };
        let sys = ReducedRhs { st: self };
        let y0 = [t0, tp0, 0.0, sigmap0];
        let traj = integrator.integrate_with_event(&sys, 0.0, &y0, param_span, Some(&event))?;

        let reduced: Vec<ReducedSample> = traj
            .samples
            .iter()
            .map(|s| ReducedSample {
                s: s.t,
                t: s.y[0],
                tp: s.y[1],
                sigma: s.y[2],
                sigmap: s.y[3],
            })
            .collect();

        // A stop at the sigma target is a normal end, not a truncation.
        let truncated = traj.event.is_some()
            && match stop_at_sigma {
                Some(target) => {
                    let last = reduced.last().unwrap();
                    (last.sigma - target).abs() > 1e-6 * (1.0 + target.abs())
                }
                None => true,
            };

        let f0 = self.f(t0);
        let energy = -tp0 * tp0 + f0 * f0 * sigmap0 * sigmap0;
        let angular_momentum = f0 * f0 * sigmap0;

        let mut energy_drift: f64 = 0.0;
        let mut ell_drift: f64 = 0.0;
        let mut length = 0.0;
        for w in reduced.windows(2) {
            let (a, b) = (w[0], w[1]);
            let e_mid = |r: &ReducedSample| {
                let f = self.f(r.t);
                -r.tp * r.tp + f * f * r.sigmap * r.sigmap
            };
            length += 0.5
                * ((-e_mid(&a)).max(0.0).sqrt() + (-e_mid(&b)).max(0.0).sqrt())
                * (b.s - a.s);
        }
        // Drift is measured against the local term scale: near a warp zero
        // the energy is a difference of two huge nearly-equal terms and the
        // naive relative error is pure cancellation noise.
        for r in &reduced {
            let f = self.f(r.t);
            let term1 = r.tp * r.tp;
            let term2 = f * f * r.sigmap * r.sigmap;
            let e = -term1 + term2;
            let ell = f * f * r.sigmap;
            let scale_e = term1.max(term2).max(energy.abs()).max(1e-12);
            let scale_l = angular_momentum.abs().max(1e-12);
            energy_drift = energy_drift.max((e - energy).abs() / scale_e);
            ell_drift = ell_drift.max((ell - angular_momentum).abs() / scale_l);
        }

        Ok(GeodesicTrace {
            fiber: self.fiber,
            x0,
            fiber_dir,
            reduced,
            energy,
            angular_momentum,
            length,
            energy_drift,
            angular_momentum_drift: ell_drift,
            truncated,
        })
    }

    /// Future-directed unit-speed vertical geodesic from (t0, x).
    pub fn vertical_geodesic(&self, t0: f64, x: DVector<f64>, span: f64) -> Result<GeodesicTrace> {
        self.integrate_reduced(x, None, t0, 1.0, 0.0, span, None)
    }
}
