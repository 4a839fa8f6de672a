//! Closed-form comparison model spaces.
//!
//! A pair of curvature bounds (kappa, beta) together with the dimension n
//! picks exactly one warped-product comparison space: an interval
//! (a, b) warped over a constant-curvature fiber by a function f solving
//! f'' + kappa f = 0 with (n-1) f'(0)/f(0) = beta. The catalog hard-codes
//! each regime's closed form; nothing is derived symbolically.
//!
//! f may be negative on its interval (the affine and vanishing-sinh regimes
//! start below zero); downstream geometry only ever uses f^2, f'/f, or |f|,
//! and no absolute value is taken silently here.

use crate::error::{Error, Result};
use crate::numerics::quad;
use crate::tolerances;
use serde::{Deserialize, Serialize};

/// Curvature bounds and dimension selecting a comparison space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Timelike Ricci lower-bound constant.
    pub kappa: f64,
    /// Mean-curvature upper bound of the base hypersurface.
    pub beta: f64,
    /// Spacetime dimension (>= 2).
    pub n: u32,
}

/// One row of the model-space catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// kappa < 0, |beta| < (n-1) sqrt|kappa|: f = cosh(qt + c)/q over a sphere.
    NegCosh,
    /// kappa < 0, |beta| = (n-1) sqrt|kappa|: f = exp(sgn(beta) q t), flat fiber.
    NegExp,
    /// kappa < 0, beta > (n-1) sqrt|kappa|: growing sinh branch, b infinite.
    NegSinhGrowing,
    /// kappa < 0, beta < -(n-1) sqrt|kappa|: sinh branch vanishing at finite b.
    NegSinhVanishing,
    /// kappa = 0, beta = 0: the static product, f constant.
    ZeroConstant,
    /// kappa = 0, beta > 0: f = t + c with c > 0, b infinite.
    ZeroAffineGrowing,
    /// kappa = 0, beta < 0: f = t + c with c < 0, vanishing at b = -c.
    ZeroAffineVanishing,
    /// kappa > 0, beta > 0: sine branch with c in (0, pi/2).
    PosSinPositive,
    /// kappa > 0, beta = 0: f = cos(sqrt(kappa) t)/sqrt(kappa).
    PosCos,
    /// kappa > 0, beta < 0: sine branch with c in (-pi/2, 0); f(0) < 0.
    PosSinNegative,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::NegCosh => "neg_cosh",
            Regime::NegExp => "neg_exp",
            Regime::NegSinhGrowing => "neg_sinh_growing",
            Regime::NegSinhVanishing => "neg_sinh_vanishing",
            Regime::ZeroConstant => "zero_constant",
            Regime::ZeroAffineGrowing => "zero_affine_growing",
            Regime::ZeroAffineVanishing => "zero_affine_vanishing",
            Regime::PosSinPositive => "pos_sin_positive",
            Regime::PosCos => "pos_cos",
            Regime::PosSinNegative => "pos_sin_negative",
        }
    }
}

/// Warping data of one comparison space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpingProfile {
    pub params: ModelParams,
    pub regime: Regime,
    /// Integration constant c(kappa, beta) of the catalog row.
    pub c: f64,
    /// Curvature of the fiber space form: -1, 0 or +1.
    pub fiber_curvature: i8,
    /// Lower end of the interval on which f is nonzero (may be -inf).
    pub lower_end: f64,
    /// Upper end b; first zero of f after 0, or +inf.
    pub upper_end: f64,
}

impl WarpingProfile {
    pub fn f(&self, t: f64) -> f64 {
        let q = self.params.kappa.abs().sqrt();
        match self.regime {
            Regime::NegCosh => (q * t + self.c).cosh() / q,
            Regime::NegExp => (self.params.beta.signum() * q * t).exp(),
            Regime::NegSinhGrowing | Regime::NegSinhVanishing => (q * t + self.c).sinh() / q,
            Regime::ZeroConstant => 1.0,
            Regime::ZeroAffineGrowing | Regime::ZeroAffineVanishing => t + self.c,
            Regime::PosSinPositive | Regime::PosSinNegative => (q * t + self.c).sin() / q,
            Regime::PosCos => (q * t).cos() / q,
        }
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        let q = self.params.kappa.abs().sqrt();
        match self.regime {
            Regime::NegCosh => (q * t + self.c).sinh(),
            Regime::NegExp => {
                let s = self.params.beta.signum();
                s * q * (s * q * t).exp()
            }
            Regime::NegSinhGrowing | Regime::NegSinhVanishing => (q * t + self.c).cosh(),
            Regime::ZeroConstant => 0.0,
            Regime::ZeroAffineGrowing | Regime::ZeroAffineVanishing => 1.0,
            Regime::PosSinPositive | Regime::PosSinNegative => (q * t + self.c).cos(),
            Regime::PosCos => -(q * t).sin(),
        }
    }

    pub fn f_second(&self, t: f64) -> f64 {
        // Every row solves f'' = -kappa f.
        -self.params.kappa * self.f(t)
    }

    /// Mean curvature (n-1) f'/f of the slice through t.
    pub fn mean_curvature(&self, t: f64) -> f64 {
        (self.params.n - 1) as f64 * self.f_prime(t) / self.f(t)
    }

    /// True when the interval's upper end is finite.
    pub fn has_finite_end(&self) -> bool {
        self.upper_end.is_finite()
    }

    /// Serializable summary row.
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            kappa: self.params.kappa,
            beta: self.params.beta,
            n: self.params.n,
            c: self.c,
            fiber_curvature: self.fiber_curvature,
            b: if self.upper_end.is_finite() {
                Some(self.upper_end)
            } else {
                None
            },
            regime_tag: self.regime.tag().to_string(),
        }
    }
}

/// JSON document form of a profile; `b: null` encodes an infinite end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub kappa: f64,
    pub beta: f64,
    pub n: u32,
    pub c: f64,
    pub fiber_curvature: i8,
    pub b: Option<f64>,
    pub regime_tag: String,
}

/// Build the comparison space for (kappa, beta, n).
///
/// Classification ties |beta| = (n-1) sqrt|kappa| resolve to the exponential
/// row, matching the catalog's equality row.
pub fn build_profile(params: ModelParams) -> Result<WarpingProfile> {
    let ModelParams { kappa, beta, n } = params;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if !kappa.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(
            "kappa and beta must be finite".to_string(),
        ));
    }
    let nm1 = (n - 1) as f64;
    let q = kappa.abs().sqrt();

    let (regime, c, fiber, lower, upper) = if kappa < 0.0 {
        // Ratio tested by the catalog's sign rows.
        let x = beta / (nm1 * q);
        if x.abs() < 1.0 {
            (Regime::NegCosh, x.atanh(), 1, f64::NEG_INFINITY, f64::INFINITY)
        } else if x.abs() == 1.0 {
            (Regime::NegExp, 0.0, 0, f64::NEG_INFINITY, f64::INFINITY)
        } else if x > 1.0 {
            // acoth(x) = atanh(1/x), positive here.
            let c = (1.0 / x).atanh();
            (Regime::NegSinhGrowing, c, -1, -c / q, f64::INFINITY)
        } else {
            let c = (1.0 / x).atanh();
            (Regime::NegSinhVanishing, c, -1, f64::NEG_INFINITY, -c / q)
        }
    } else if kappa == 0.0 {
        if beta == 0.0 {
            (Regime::ZeroConstant, 0.0, 0, f64::NEG_INFINITY, f64::INFINITY)
        } else if beta > 0.0 {
            let c = nm1 / beta;
            (Regime::ZeroAffineGrowing, c, -1, -c, f64::INFINITY)
        } else {
            let c = nm1 / beta;
            (Regime::ZeroAffineVanishing, c, -1, f64::NEG_INFINITY, -c)
        }
    } else {
        use std::f64::consts::PI;
        if beta == 0.0 {
            let c = PI / 2.0;
            (Regime::PosCos, c, -1, -0.5 * PI / q, 0.5 * PI / q)
        } else if beta > 0.0 {
            // acot into (0, pi/2): f positive at 0, vanishing at (pi - c)/q.
            let c = (nm1 * q / beta).atan();
            (Regime::PosSinPositive, c, -1, -c / q, (PI - c) / q)
        } else {
            // acot branch into (-pi/2, 0): f(0) < 0, first zero at -c/q.
            let c = (nm1 * q / beta).atan();
            (Regime::PosSinNegative, c, -1, (-PI - c) / q, -c / q)
        }
    };

    Ok(WarpingProfile {
        params,
        regime,
        c,
        fiber_curvature: fiber,
        lower_end: lower,
        upper_end: upper,
    })
}

/// Scalar comparison function: the solution of s' + s^2 + kappa = 0 that
/// blows up as t -> 0+ (cot / 1/t / coth family).
pub fn s_kappa(kappa: f64, t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!("s_kappa needs t > 0, got {t}")));
    }
    if kappa > 0.0 {
        let q = kappa.sqrt();
        if t >= std::f64::consts::PI / q {
            return Err(Error::Domain(format!(
                "s_kappa pole: t = {t} >= pi/sqrt(kappa) = {}",
                std::f64::consts::PI / q
            )));
        }
        Ok(q * (q * t).cos() / (q * t).sin())
    } else if kappa == 0.0 {
        Ok(1.0 / t)
    } else {
        let q = (-kappa).sqrt();
        Ok(q / (q * t).tanh())
    }
}

/// Domain end of the scalar comparison function: pi/sqrt(kappa) for
/// kappa > 0, infinite otherwise.
pub fn s_kappa_domain_end(kappa: f64) -> f64 {
    if kappa > 0.0 {
        std::f64::consts::PI / kappa.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Relative volume of future balls in a model space.
#[derive(Debug, Clone)]
pub struct VolumeProfile {
    profile: WarpingProfile,
    v_bar: f64,
}

impl VolumeProfile {
    /// v(t): relative ball volume, constant v_bar past the upper end.
    pub fn v(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let b = self.profile.upper_end;
        if t >= b {
            return Ok(self.v_bar);
        }
        integrate_relative_volume(&self.profile, t)
    }

    /// Saturated volume v(b); infinite when the integral diverges.
    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn profile(&self) -> &WarpingProfile {
        &self.profile
    }
}

fn integrate_relative_volume(profile: &WarpingProfile, t: f64) -> Result<f64> {
    let f0 = profile.f(0.0);
    let p = (profile.params.n - 1) as i32;
    let integrand = move |tau: f64| (profile.f(tau) / f0).powi(p);
    quad::adaptive_simpson(&integrand, 0.0, t)
}

/// Compute the volume profile of a comparison space.
pub fn volume_profile(profile: &WarpingProfile) -> Result<VolumeProfile> {
    let v_bar = if profile.upper_end.is_finite() {
        integrate_relative_volume(profile, profile.upper_end)?
    } else {
        match profile.regime {
            // exp(-qt) is the one infinite-interval row with a convergent
            // volume integral.
            Regime::NegExp if profile.params.beta < 0.0 => {
                let q = profile.params.kappa.abs().sqrt();
                1.0 / (q * (profile.params.n - 1) as f64)
            }
            _ => f64::INFINITY,
        }
    };
    Ok(VolumeProfile {
        profile: *profile,
        v_bar,
    })
}

/// Horizon to use when sampling a profile with an infinite upper end.
pub fn effective_upper(profile: &WarpingProfile, t_max: Option<f64>) -> f64 {
    let cap = t_max.unwrap_or(tolerances::T_MAX_DEFAULT);
    profile.upper_end.min(cap)
}
