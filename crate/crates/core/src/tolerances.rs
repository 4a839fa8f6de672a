//! Pinned numerical tolerances and defaults.
//!
//! Every threshold used by the engine lives here so that verification runs
//! are reproducible and no module invents ad-hoc magic numbers.

/// Relative tolerance of the adaptive embedded Runge-Kutta integrator.
pub const ODE_REL_TOL: f64 = 1e-10;

/// Absolute tolerance of the adaptive embedded Runge-Kutta integrator.
pub const ODE_ABS_TOL: f64 = 1e-12;

/// Trace threshold that declares a Riccati trajectory blown up.
/// Riccati blow-up is a vertical asymptote, so a large-threshold crossing
/// localizes the asymptote to within ~1/threshold.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Bisection refinement width (in t) for event localization.
pub const EVENT_T_TOL: f64 = 1e-9;

/// Default start time replacing the t -> 0+ asymptotic Riccati condition.
pub const ASYMPTOTIC_T_START: f64 = 1e-4;

/// Horizon used when a model space has an infinite upper end.
pub const T_MAX_DEFAULT: f64 = 50.0;

/// Multi-start count for shooting searches.
pub const MULTISTART_COUNT: usize = 32;

/// Parameter-space tolerance for shooting refinement.
pub const SHOOTING_PARAM_TOL: f64 = 1e-12;

/// Coarse integrator tolerance used while scanning shooting brackets.
pub const SCAN_REL_TOL: f64 = 1e-7;

/// Two maximizers within this length tolerance count as competing geodesics.
pub const COMPETING_TIE_TOL: f64 = 1e-6;

/// Points closer than this to the cut locus are excluded from d'Alembertian
/// sampling; the time separation is not twice differentiable there.
pub const CUT_EXCLUSION_BAND: f64 = 1e-3;

/// Band around the cut parameter dropped (and reported) in area integrals.
pub const CUT_AREA_BAND: f64 = 1e-4;

/// Velocity Cauchy tolerance declaring an asymptote converged.
pub const ASYMPTOTE_CAUCHY_TOL: f64 = 1e-5;

/// Margin kept between trajectories and the open t-interval ends.
pub const DOMAIN_MARGIN: f64 = 1e-6;

/// Relative tolerance of adaptive quadrature.
pub const QUAD_REL_TOL: f64 = 1e-11;

/// Absolute tolerance of adaptive quadrature.
pub const QUAD_ABS_TOL: f64 = 1e-13;

/// Equality tolerance for comparison margins (rigidity detection).
pub const EQUALITY_TOL: f64 = 1e-8;

/// Tangent vectors with |g(v,v)| below this band classify as null.
pub const NULL_CLASSIFICATION_BAND: f64 = 1e-12;

/// Default finite-difference step scale for graph curvature.
pub const GRAPH_FD_STEP: f64 = 1e-4;

/// Default resolution per axis for fiber quadrature.
pub const FIBER_QUAD_RESOLUTION: usize = 64;

/// Default number of points in comparison t-grids.
pub const T_GRID_POINTS: usize = 128;

/// Spherical fiber charts are valid up to radius pi minus this guard.
pub const SPHERE_CHART_GUARD: f64 = 1e-6;
