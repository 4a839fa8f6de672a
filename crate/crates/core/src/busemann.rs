//! Busemann functions of Sigma-rays, asymptotes, level sets, and the
//! support mean-curvature and co-ray checks.
//!
//! The Busemann function of a ray gamma is the monotone limit of the
//! truncations r - tau_x(gamma(r)). Every value reports its truncation table
//! and a tail bound; the limit is never silently accepted.

use crate::distance::ShootingOptions;
use crate::error::{Error, Result};
use crate::model::{build_profile, s_kappa, ModelParams};
use crate::numerics::roots;
use crate::spacetime::{GeodesicTrace, Hypersurface, Point, PropagatorStart, Spacetime};
use crate::tolerances;
use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

/// A future-inextendible unit-speed geodesic maximizing distance to Sigma.
#[derive(Debug, Clone)]
pub struct SigmaRay {
    pub trace: GeodesicTrace,
    pub sigma: Hypersurface,
    /// Domain endpoint of the ray (its length, finite or horizon-capped).
    pub a: f64,
}

impl SigmaRay {
    /// Point on the ray at arclength r.
    pub fn point(&self, r: f64) -> Point {
        self.trace.point_at(r)
    }
}

impl Spacetime {
    /// Construct the vertical Sigma-ray through fiber point x and validate
    /// its defining maximality tau_Sigma(gamma(t)) = t on samples.
    pub fn sigma_ray(
        &self,
        sigma: &Hypersurface,
        x: &DVector<f64>,
        opts: &ShootingOptions,
    ) -> Result<SigmaRay> {
        let t0 = sigma.height(x);
        if !self.contains_t(t0) {
            return Err(Error::DomainExit(t0));
        }
        let a = self.t_max - t0;
        let trace = self.vertical_geodesic(t0, x.clone(), a - tolerances::DOMAIN_MARGIN)?;
        let span = trace.span();
        for frac in [0.25, 0.5, 0.75] {
            let s = span * frac;
            let q = trace.point_at(s);
            let tau = self.tau_sigma(sigma, &q, opts).value;
            if (tau - s).abs() > 1e-6 * s.max(1.0) {
                return Err(Error::Precondition(format!(
                    "normal geodesic is not a Sigma-ray: tau = {tau} at arclength {s}"
                )));
            }
        }
        Ok(SigmaRay {
            trace,
            sigma: sigma.clone(),
            a,
        })
    }
}

/// A Busemann value together with its truncation table.
#[derive(Debug, Clone, Serialize)]
pub struct BusemannValue {
    pub value: f64,
    /// (r, r - tau_x(gamma(r))) along the schedule.
    pub truncations: Vec<(f64, f64)>,
    /// Gap of the last two truncations.
    pub tail_bound: f64,
    /// Nonincreasing within tolerance along the schedule.
    pub monotone: bool,
}

/// CSV rows (fiber coordinates..., t) of sampled level-set points.
pub fn level_set_to_csv(points: &[Point]) -> String {
    let mut out = String::new();
    if let Some(first) = points.first() {
        for i in 0..first.x.len() {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("t
");
    }
    for p in points {
        for v in p.x.iter() {
            out.push_str(&format!("{v:.12e},"));
        }
        out.push_str(&format!("{:.12e}
", p.t));
    }
    out
}

impl BusemannValue {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,truncation\n");
        for (r, v) in &self.truncations {
            out.push_str(&format!("{r:.12e},{v:.12e}\n"));
        }
        out
    }
}

/// An asymptote to a ray: the limit of maximizers to gamma(s_n).
#[derive(Debug, Clone)]
pub struct Asymptote {
    pub trace: GeodesicTrace,
    /// Largest velocity gap over the last schedule points.
    pub velocity_gap: f64,
    /// The velocity sequence was Cauchy within tolerance. Failure is a
    /// first-class outcome: only subsequential limits are guaranteed.
    pub converged: bool,
}

impl Spacetime {
    /// Truncation schedule approaching the ray's endpoint: geometric for a
    /// finite endpoint, arithmetic toward the horizon otherwise.
    pub fn busemann_schedule(&self, ray: &SigmaRay, r0: f64, count: usize) -> Vec<f64> {
        let a = ray.a;
        let cap = ray.trace.span() - 1e-3;
        let mut out = Vec::with_capacity(count);
        if a.is_finite() {
            for k in 0..count {
                let r = a - (a - r0) * 0.5f64.powi(k as i32);
                out.push(r.min(cap).max(r0));
            }
        } else {
            let hi = cap;
            for k in 0..count {
                out.push(r0 + (hi - r0) * k as f64 / (count - 1) as f64);
            }
        }
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// Busemann value b(x) = lim r - tau_x(gamma(r)) along the schedule.
    pub fn busemann(
        &self,
        x: &Point,
        ray: &SigmaRay,
        schedule: &[f64],
        opts: &ShootingOptions,
    ) -> Result<BusemannValue> {
        if schedule.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".to_string()));
        }
        // The truncation map is only defined (and monotone) once the ray
        // point lies in the chronological future of x; earlier schedule
        // entries are dropped.
        let mut truncations = Vec::with_capacity(schedule.len());
        for &r in schedule {
            let gp = ray.point(r);
            let tau = self.tau_point(x, &gp, opts);
            if tau.value > 0.0 {
                truncations.push((r, r - tau.value));
            }
        }
        if truncations.is_empty() {
            return Err(Error::Precondition(
                "point is not in the past of the ray".to_string(),
            ));
        }
        let mut monotone = true;
        for w in truncations.windows(2) {
            if w[1].1 > w[0].1 + 1e-8 * w[0].1.abs().max(1.0) {
                monotone = false;
            }
        }
        let value = truncations.last().unwrap().1;
        let tail_bound = if truncations.len() >= 2 {
            (truncations[truncations.len() - 2].1 - value).abs()
        } else {
            f64::INFINITY
        };
        Ok(BusemannValue {
            value,
            truncations,
            tail_bound,
            monotone,
        })
    }

    /// Asymptote to the ray at p: record initial velocities of maximizers to
    /// gamma(s) along the schedule, check the Cauchy property over the last
    /// three, and integrate the limit geodesic.
    pub fn asymptote(
        &self,
        p: &Point,
        ray: &SigmaRay,
        schedule: &[f64],
        opts: &ShootingOptions,
    ) -> Result<Asymptote> {
        // Early schedule entries need not be connected to p yet; the
        // asymptote only uses the tail of the maximizer family.
        let mut velocities: Vec<(f64, DVector<f64>)> = Vec::new();
        for &r in schedule {
            let gp = ray.point(r);
            let res = self.tau_point(p, &gp, opts);
            if let Some(m) = res.maximizer {
                velocities.push(m.initial_velocity());
            }
        }
        if velocities.len() < 3 {
            return Err(Error::Precondition(format!(
                "only {} schedule points connect to p; need at least three",
                velocities.len()
            )));
        }
        let tail = &velocities[velocities.len() - 3..];
        let mut gap: f64 = 0.0;
        for i in 0..tail.len() {
            for j in i + 1..tail.len() {
                let ddt = tail[i].0 - tail[j].0;
                let ddx = (&tail[i].1 - &tail[j].1).norm();
                gap = gap.max((ddt * ddt + ddx * ddx).sqrt());
            }
        }
        let converged = gap < tolerances::ASYMPTOTE_CAUCHY_TOL;
        let (dt0, dx0) = velocities.last().unwrap().clone();
        let v = self.tangent(p, dt0, dx0);
        let span = (self.t_max - p.t) / dt0.max(1.0) - tolerances::DOMAIN_MARGIN;
        let trace = self.geodesic(p, &v, span)?;
        Ok(Asymptote {
            trace,
            velocity_gap: gap,
            converged,
        })
    }

    /// Point on the Busemann level set over fiber point y, found by
    /// bisection of b along the vertical line.
    pub fn busemann_level_point(
        &self,
        ray: &SigmaRay,
        t_level: f64,
        y: &DVector<f64>,
        schedule: &[f64],
        opts: &ShootingOptions,
    ) -> Result<Point> {
        let last_height = ray.point(*schedule.last().expect("nonempty schedule")).t;
        let g = |t: f64| -> f64 {
            let x = Point::new(t, y.clone());
            match self.busemann(&x, ray, schedule, opts) {
                Ok(b) => b.value - t_level,
                // Not in the past of any schedule point: below the ray's
                // past reads low, above its visible future reads high.
                Err(_) => {
                    if t > last_height - 0.1 * (last_height - self.t_min) {
                        1.0
                    } else {
                        -1.0
                    }
                }
            }
        };
        let lo = self.t_min + 0.05 * (self.t_max - self.t_min);
        let hi = last_height - 1e-3 * (last_height - self.t_min);
        let t = roots::bisect(&g, lo, hi, 1e-8)?;
        Ok(Point::new(t, y.clone()))
    }
}

/// Outcome of the support mean-curvature bound check along one level set.
#[derive(Debug, Clone, Serialize)]
pub struct SupportBoundReport {
    pub level: f64,
    pub points: usize,
    pub sphere_samples: usize,
    /// min over samples of H_sphere + (n-1) s_kappa(s).
    pub worst_margin: f64,
    /// max over samples of |H_sphere + (n-1) s_kappa(s)|.
    pub max_equality_gap: f64,
    pub holds: bool,
}

impl Spacetime {
    /// Check the support bound: the mean curvature of past spheres centered
    /// on asymptotes through the level set satisfies H >= -(n-1) s_kappa(s).
    #[allow(clippy::too_many_arguments)]
    pub fn support_bound_check(
        &self,
        ray: &SigmaRay,
        t_level: f64,
        kappa: f64,
        point_budget: usize,
        sphere_budget: usize,
        seed: u64,
        opts: &ShootingOptions,
    ) -> Result<SupportBoundReport> {
        let mut rng = crate::seeded_rng(seed);
        let schedule = self.busemann_schedule(ray, t_level.max(0.1) * 0.5, 8);
        // Maximizers from level points only exist to ray points above the
        // level; the asymptote schedule starts there.
        let asym_r0 = t_level + 0.2 * (ray.trace.span() - t_level).max(0.1);
        let asym_schedule = self.busemann_schedule(ray, asym_r0, 8);
        let nm1 = (self.n - 1) as f64;
        let mut worst = f64::INFINITY;
        let mut gap: f64 = 0.0;
        let mut points = 0;
        let mut sphere_samples = 0;
        for _ in 0..point_budget {
            let y = self.random_fiber_point(0.4, &mut rng);
            let p = self.busemann_level_point(ray, t_level, &y, &schedule, opts)?;
            let b_p = self.busemann(&p, ray, &schedule, opts)?.value;
            if (b_p - t_level).abs() > 1e-4 * t_level.max(1.0) {
                continue;
            }
            points += 1;
            let asym = self.asymptote(&p, ray, &asym_schedule, opts)?;
            let s_max = (ray.a - t_level).min(asym.trace.span()) * 0.9;
            for k in 1..=sphere_budget {
                let s = s_max * k as f64 / (sphere_budget + 1) as f64;
                if s <= 0.05 {
                    continue;
                }
                // Past sphere of radius s centered at alpha_p(s): its mean
                // curvature at p is minus the point-propagator trace along
                // the past-directed geodesic from the center.
                let top = asym.trace.reduced_at(s);
                let (x_top, dir_top) = match &asym.trace.fiber_dir {
                    None => (asym.trace.fiber_point(top.sigma), None),
                    Some(u) => {
                        let (x, v) = self.fiber.flow(&asym.trace.x0, u, top.sigma);
                        (x, Some(-v))
                    }
                };
                let start = PropagatorStart {
                    x0: x_top,
                    fiber_dir: dir_top,
                    t0: top.t,
                    tp0: -top.tp,
                    sigmap0: top.sigmap,
                };
                let trace_down = self.point_shape_trace(&start, s)?;
                let h_sphere = -trace_down;
                let bound = -nm1 * s_kappa(kappa, s)?;
                let margin = h_sphere - bound;
                worst = worst.min(margin);
                gap = gap.max(margin.abs());
                sphere_samples += 1;
            }
        }
        if sphere_samples == 0 {
            return Err(Error::NonConvergence(
                "no usable support-bound samples".to_string(),
            ));
        }
        Ok(SupportBoundReport {
            level: t_level,
            points,
            sphere_samples,
            worst_margin: worst,
            max_equality_gap: gap,
            holds: worst >= -1e-5,
        })
    }
}

/// Outcome of the co-ray check.
#[derive(Debug, Clone, Serialize)]
pub enum CoRayReport {
    /// The curvature-regime or maximal-length precondition failed.
    Skipped { reason: String },
    Checked {
        rays_checked: usize,
        max_deviation: f64,
        holds: bool,
    },
}

impl Spacetime {
    /// Given a maximal Sigma-ray, verify that nearby normal geodesics are
    /// also Sigma-rays: tau_Sigma(sigma_q(t)) = t up to the horizon.
    #[allow(clippy::too_many_arguments)]
    pub fn co_ray_check(
        &self,
        sigma: &Hypersurface,
        ray: &SigmaRay,
        kappa: f64,
        beta: f64,
        neighborhood_radius: f64,
        sample_budget: usize,
        seed: u64,
        opts: &ShootingOptions,
    ) -> Result<CoRayReport> {
        let nm1 = (self.n - 1) as f64;
        let boundary = -nm1 * kappa.abs().sqrt();
        if !(kappa > 0.0 || beta <= boundary) {
            return Ok(CoRayReport::Skipped {
                reason: format!(
                    "regime excluded: kappa = {kappa} <= 0 and beta = {beta} > {boundary}"
                ),
            });
        }
        let ccc = self.ccc_check(sigma, kappa, beta, 200, seed)?;
        if !ccc.holds {
            return Ok(CoRayReport::Skipped {
                reason: format!(
                    "curvature condition fails: ricci margin {}, mean curvature margin {}",
                    ccc.ricci_margin, ccc.mean_curv_margin
                ),
            });
        }
        let profile = build_profile(ModelParams {
            kappa,
            beta,
            n: self.n,
        })?;
        let b = profile.upper_end;
        if b.is_finite() && ray.a < b - 1e-3 {
            return Ok(CoRayReport::Skipped {
                reason: format!("ray length {} is below the maximal length {b}", ray.a),
            });
        }
        let mut rng = crate::seeded_rng(seed);
        let foot = ray.trace.x0.clone();
        let mut max_dev: f64 = 0.0;
        let mut rays_checked = 0;
        for _ in 0..sample_budget {
            let mut y = foot.clone();
            for i in 0..y.len() {
                y[i] += (rng.random::<f64>() * 2.0 - 1.0) * neighborhood_radius;
            }
            let t0 = sigma.height(&y);
            if !self.contains_t(t0) {
                continue;
            }
            let span = (self.t_max - t0 - 1e-3).min(ray.a - 1e-3);
            let Ok(normal) = self.vertical_geodesic(t0, y, span) else {
                continue;
            };
            rays_checked += 1;
            for frac in [0.3, 0.6, 0.95] {
                let s = normal.span() * frac;
                let q = normal.point_at(s);
                let tau = self.tau_sigma(sigma, &q, opts).value;
                max_dev = max_dev.max((tau - s).abs());
            }
        }
        if rays_checked == 0 {
            return Err(Error::NonConvergence(
                "no co-ray samples inside the domain".to_string(),
            ));
        }
        Ok(CoRayReport::Checked {
            rays_checked,
            max_deviation: max_dev,
            holds: max_dev < 1e-5,
        })
    }
}
