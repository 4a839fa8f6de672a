//! Generalized Robertson-Walker spacetimes -dt^2 + f(t)^2 h_k.
//!
//! A spacetime is an open t-interval warped over a constant-curvature fiber.
//! The fiber is closed-form ([`crate::fiber`]), so every ODE in the crate is
//! the two-variable geodesic reduction plus linear Jacobi systems.

mod geodesic;
mod jacobi;
mod shape;

pub use geodesic::{GeodesicSample, GeodesicTrace};
pub use jacobi::{FocalOutcome, JacobiOutcome, PropagatorStart, SigmaInit};
pub use shape::ShapeOperator;

use crate::error::{Error, Result};
use crate::fiber::SpaceForm;
use crate::model::WarpingProfile;
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// Warping function with two derivatives.
pub trait Warp: Send + Sync {
    fn f(&self, t: f64) -> f64;
    fn df(&self, t: f64) -> f64;
    fn ddf(&self, t: f64) -> f64;
}

impl Warp for WarpingProfile {
    fn f(&self, t: f64) -> f64 {
        WarpingProfile::f(self, t)
    }
    fn df(&self, t: f64) -> f64 {
        self.f_prime(t)
    }
    fn ddf(&self, t: f64) -> f64 {
        self.f_second(t)
    }
}

/// Warp built from three closures (tests and the named-form catalog).
pub struct FnWarp {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ddf: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Warp for FnWarp {
    fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn df(&self, t: f64) -> f64 {
        (self.df)(t)
    }
    fn ddf(&self, t: f64) -> f64 {
        (self.ddf)(t)
    }
}

struct ReversedWarp(Arc<dyn Warp>);

impl Warp for ReversedWarp {
    fn f(&self, t: f64) -> f64 {
        self.0.f(-t)
    }
    fn df(&self, t: f64) -> f64 {
        -self.0.df(-t)
    }
    fn ddf(&self, t: f64) -> f64 {
        self.0.ddf(-t)
    }
}

/// A point (t, x) with fiber chart coordinates x.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: DVector<f64>,
}

impl Point {
    pub fn new(t: f64, x: DVector<f64>) -> Self {
        Point { t, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalType {
    Timelike,
    Null,
    Spacelike,
}

/// A tangent vector (dt, dx) at a point, with cached causal type.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub dt: f64,
    pub dx: DVector<f64>,
    pub causal_type: CausalType,
}

/// Height function of a graph hypersurface over the fiber chart.
pub type GraphFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Spacelike hypersurfaces supported by the engine: constant-time slices and
/// graphs t = u(x) over the fiber.
#[derive(Clone)]
pub enum Hypersurface {
    Slice(f64),
    Graph(GraphFn),
}

impl Hypersurface {
    pub fn graph(u: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static) -> Self {
        Hypersurface::Graph(Arc::new(u))
    }

    /// Height of the hypersurface over fiber point x.
    pub fn height(&self, x: &DVector<f64>) -> f64 {
        match self {
            Hypersurface::Slice(t0) => *t0,
            Hypersurface::Graph(u) => u(x),
        }
    }

    pub fn point_at(&self, x: &DVector<f64>) -> Point {
        Point::new(self.height(x), x.clone())
    }
}

impl fmt::Debug for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypersurface::Slice(t0) => write!(f, "Slice({t0})"),
            Hypersurface::Graph(_) => write!(f, "Graph(..)"),
        }
    }
}

/// A generalized Robertson-Walker spacetime.
#[derive(Clone)]
pub struct Spacetime {
    pub n: u32,
    pub fiber: SpaceForm,
    warp: Arc<dyn Warp>,
    pub t_min: f64,
    pub t_max: f64,
}

impl fmt::Debug for Spacetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spacetime")
            .field("n", &self.n)
            .field("fiber", &self.fiber)
            .field("t_min", &self.t_min)
            .field("t_max", &self.t_max)
            .finish()
    }
}

impl Spacetime {
    /// Build a spacetime, validating that f has no zero on the interval.
    pub fn new(
        n: u32,
        fiber_curvature: i8,
        warp: Arc<dyn Warp>,
        t_min: f64,
        t_max: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
            return Err(Error::InvalidParameter(format!(
                "invalid t-interval ({t_min}, {t_max})"
            )));
        }
        let st = Spacetime {
            n,
            fiber: SpaceForm::new(fiber_curvature, (n - 1) as usize),
            warp,
            t_min,
            t_max,
        };
        // f must not vanish inside the open interval.
        let samples = 512;
        let mut prev = st.f(t_min + tolerances::DOMAIN_MARGIN);
        for i in 1..=samples {
            let t = t_min + (t_max - t_min) * i as f64 / samples as f64;
            let t = t.min(t_max - tolerances::DOMAIN_MARGIN);
            let v = st.f(t);
            if v == 0.0 || prev * v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "warping function vanishes near t = {t}"
                )));
            }
            prev = v;
        }
        Ok(st)
    }

    /// Spacetime of a comparison profile, over its interval clipped to the
    /// default horizon.
    pub fn from_profile(profile: &WarpingProfile) -> Result<Self> {
        Self::from_profile_capped(profile, tolerances::T_MAX_DEFAULT)
    }

    pub fn from_profile_capped(profile: &WarpingProfile, t_cap: f64) -> Result<Self> {
        let t_min = profile.lower_end.max(-t_cap);
        let t_max = profile.upper_end.min(t_cap);
        Spacetime::new(
            profile.params.n,
            profile.fiber_curvature,
            Arc::new(*profile),
            t_min,
            t_max,
        )
    }

    pub fn f(&self, t: f64) -> f64 {
        self.warp.f(t)
    }
    pub fn df(&self, t: f64) -> f64 {
        self.warp.df(t)
    }
    pub fn ddf(&self, t: f64) -> f64 {
        self.warp.ddf(t)
    }

    /// Mean curvature of the slice through t: (n-1) f'/f.
    pub fn slice_mean_curvature(&self, t: f64) -> f64 {
        (self.n - 1) as f64 * self.df(t) / self.f(t)
    }

    pub fn contains_t(&self, t: f64) -> bool {
        t > self.t_min && t < self.t_max
    }

    /// Full metric matrix at p in (t, x) coordinates.
    pub fn metric(&self, p: &Point) -> DMatrix<f64> {
        let d = self.fiber.dim;
        let mut g = DMatrix::zeros(d + 1, d + 1);
        g[(0, 0)] = -1.0;
        let f2 = self.f(p.t).powi(2);
        let h = self.fiber.metric(&p.x);
        for i in 0..d {
            for j in 0..d {
                g[(i + 1, j + 1)] = f2 * h[(i, j)];
            }
        }
        g
    }

    /// Lorentzian inner product of two tangents at p.
    pub fn g(&self, p: &Point, v: &Tangent, w: &Tangent) -> f64 {
        -v.dt * w.dt + self.f(p.t).powi(2) * self.fiber.inner(&p.x, &v.dx, &w.dx)
    }

    /// Classify and build a tangent vector at p.
    pub fn tangent(&self, p: &Point, dt: f64, dx: DVector<f64>) -> Tangent {
        let norm2 = -dt * dt + self.f(p.t).powi(2) * self.fiber.inner(&p.x, &dx, &dx);
        let causal_type = if norm2.abs() < tolerances::NULL_CLASSIFICATION_BAND {
            CausalType::Null
        } else if norm2 < 0.0 {
            CausalType::Timelike
        } else {
            CausalType::Spacelike
        };
        Tangent { dt, dx, causal_type }
    }

    /// Ricci curvature as a quadratic form on any tangent vector: the
    /// closed-form GRW decomposition.
    pub fn ricci_quadratic(&self, p: &Point, v: &Tangent) -> f64 {
        let f = self.f(p.t);
        let fp = self.df(p.t);
        let fpp = self.ddf(p.t);
        let nm1 = (self.n - 1) as f64;
        let nm2 = (self.n - 2) as f64;
        let k = self.fiber.curvature as f64;
        let dx2 = self.fiber.inner(&p.x, &v.dx, &v.dx);
        -nm1 * (fpp / f) * v.dt * v.dt + (f * fpp + nm2 * (fp * fp + k)) * dx2
    }

    /// Ricci curvature Ric(v, v) for timelike v.
    pub fn ricci_timelike(&self, p: &Point, v: &Tangent) -> Result<f64> {
        if v.causal_type != CausalType::Timelike {
            return Err(Error::Precondition(format!(
                "ricci_timelike needs a timelike vector, got {:?}",
                v.causal_type
            )));
        }
        Ok(self.ricci_quadratic(p, v))
    }

    /// Time-reversed spacetime: f~(t) = f(-t) on the mirrored interval.
    pub fn time_reverse(&self) -> Spacetime {
        Spacetime {
            n: self.n,
            fiber: self.fiber,
            warp: Arc::new(ReversedWarp(self.warp.clone())),
            t_min: -self.t_max,
            t_max: -self.t_min,
        }
    }

    /// Sample a random unit timelike tangent at p (future-directed).
    pub fn random_unit_timelike(&self, p: &Point, rng: &mut impl Rng) -> Tangent {
        let d = self.fiber.dim;
        let rapidity: f64 = rng.random::<f64>() * 2.0;
        let mut dir = DVector::zeros(d);
        loop {
            for i in 0..d {
                dir[i] = rng.random::<f64>() * 2.0 - 1.0;
            }
            if dir.norm() > 1e-3 {
                break;
            }
        }
        let dir = self.fiber.unit(&p.x, &dir);
        // cosh/sinh split keeps the vector exactly unit timelike.
        let dt = rapidity.cosh();
        let dx = dir * (rapidity.sinh() / self.f(p.t).abs());
        self.tangent(p, dt, dx)
    }

    /// Sample a random point in the interior, |x| < radius in the chart.
    pub fn random_point(&self, radius: f64, rng: &mut impl Rng) -> Point {
        let margin = 1e-2 * (self.t_max - self.t_min);
        let t = self.t_min + margin + (self.t_max - self.t_min - 2.0 * margin) * rng.random::<f64>();
        Point::new(t, self.random_fiber_point(radius, rng))
    }

    pub fn random_fiber_point(&self, radius: f64, rng: &mut impl Rng) -> DVector<f64> {
        let d = self.fiber.dim;
        let radius = radius.min(self.fiber.chart_radius() * 0.8);
        let mut x = DVector::zeros(d);
        loop {
            for i in 0..d {
                x[i] = (rng.random::<f64>() * 2.0 - 1.0) * radius;
            }
            if x.norm() <= radius {
                return x;
            }
        }
    }

    /// Check the curvature condition pair: Ric(v,v) >= -(n-1) kappa g(v,v)
    /// over random unit timelike samples, and H_Sigma <= beta over random
    /// hypersurface points.
    pub fn ccc_check(
        &self,
        sigma: &Hypersurface,
        kappa: f64,
        beta: f64,
        sample_budget: usize,
        seed: u64,
    ) -> Result<CccReport> {
        let mut rng = crate::seeded_rng(seed);
        let nm1 = (self.n - 1) as f64;
        let mut ricci_margin = f64::INFINITY;

        for _ in 0..sample_budget {
            let p = self.random_point(1.5, &mut rng);
            let v = self.random_unit_timelike(&p, &mut rng);
            // Unit timelike: g(v,v) = -1, so the bound reads Ric >= (n-1) kappa.
            let margin = self.ricci_quadratic(&p, &v) - nm1 * kappa;
            ricci_margin = ricci_margin.min(margin);
        }

        let h_samples = (sample_budget / 8).max(8);
        let mut mean_curv_margin = f64::INFINITY;
        for _ in 0..h_samples {
            let x = self.random_fiber_point(1.5, &mut rng);
            let p = sigma.point_at(&x);
            if !self.contains_t(p.t) {
                return Err(Error::Precondition(format!(
                    "hypersurface leaves the t-interval at x = {x:?}"
                )));
            }
            let h = match sigma {
                Hypersurface::Slice(t0) => self.slice_mean_curvature(*t0),
                Hypersurface::Graph(_) => self.shape_operator(sigma, &p)?.mean_curvature,
            };
            mean_curv_margin = mean_curv_margin.min(beta - h);
        }

        let tol = 1e-8;
        Ok(CccReport {
            holds: ricci_margin >= -tol && mean_curv_margin >= -tol,
            ricci_margin,
            mean_curv_margin,
            samples: sample_budget,
        })
    }
}

/// Outcome of a sampled cosmological-comparison-condition check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CccReport {
    pub holds: bool,
    /// min over samples of Ric(v,v) - (n-1) kappa for unit timelike v.
    pub ricci_margin: f64,
    /// min over samples of beta - H_Sigma.
    pub mean_curv_margin: f64,
    pub samples: usize,
}
