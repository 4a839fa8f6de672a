//! Spacetime description files.
//!
//! A spacetime is specified by a JSON document
//! `{schema_version, n, fiber_curvature, f, t_min, t_max}` where `f` is a
//! catalog profile (`table1`), a named closed form (`expression`), or cubic
//! spline data (`samples`). Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::model::{build_profile, ModelParams};
use crate::spacetime::{FnWarp, Spacetime, Warp};
use crate::tolerances;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeConfig {
    pub schema_version: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_curvature: Option<i8>,
    pub f: WarpSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpSpec {
    /// Comparison-space profile for (kappa, beta).
    Table1 { kappa: f64, beta: f64 },
    /// Named closed form f(t) = coeff * base(rate t + phase).
    Expression {
        name: NamedForm,
        #[serde(default = "one")]
        coeff: f64,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Natural cubic spline through (t, f) knots.
    Samples { knots: Vec<(f64, f64)> },
}

fn one() -> f64 {
    1.0
}

/// The fixed catalog of named warp forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedForm {
    Cos,
    Sin,
    Sinh,
    Cosh,
    Exp,
    Affine,
}

impl SpacetimeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SpacetimeConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("config parse error: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Instantiate the spacetime this config describes.
    pub fn build(&self) -> Result<Spacetime> {
        match &self.f {
            WarpSpec::Table1 { kappa, beta } => {
                let profile = build_profile(ModelParams {
                    kappa: *kappa,
                    beta: *beta,
                    n: self.n,
                })?;
                if let Some(k) = self.fiber_curvature {
                    if k != profile.fiber_curvature {
                        return Err(Error::InvalidParameter(format!(
                            "fiber_curvature {k} conflicts with the catalog fiber {}",
                            profile.fiber_curvature
                        )));
                    }
                }
                let t_min = self.t_min.unwrap_or(profile.lower_end.max(-tolerances::T_MAX_DEFAULT));
                let t_max = self.t_max.unwrap_or(profile.upper_end.min(tolerances::T_MAX_DEFAULT));
                Spacetime::new(self.n, profile.fiber_curvature, Arc::new(profile), t_min, t_max)
            }
            WarpSpec::Expression {
                name,
                coeff,
                rate,
                phase,
            } => {
                let fiber = self.fiber_curvature.ok_or_else(|| {
                    Error::InvalidParameter("expression warp requires fiber_curvature".to_string())
                })?;
                let (t_min, t_max) = self.interval()?;
                let warp = named_warp(*name, *coeff, *rate, *phase);
                Spacetime::new(self.n, fiber, warp, t_min, t_max)
            }
            WarpSpec::Samples { knots } => {
                let fiber = self.fiber_curvature.ok_or_else(|| {
                    Error::InvalidParameter("sample warp requires fiber_curvature".to_string())
                })?;
                let (t_min, t_max) = self.interval()?;
                let spline = CubicSpline::fit(knots)?;
                Spacetime::new(self.n, fiber, Arc::new(spline), t_min, t_max)
            }
        }
    }

    fn interval(&self) -> Result<(f64, f64)> {
        match (self.t_min, self.t_max) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidParameter(
                "t_min and t_max are required for non-catalog warps".to_string(),
            )),
        }
    }
}

type ScalarFn = fn(f64) -> f64;

/// f(t) = coeff * base(rate t + phase) with exact derivatives.
fn named_warp(name: NamedForm, coeff: f64, rate: f64, phase: f64) -> Arc<dyn Warp> {
    let base: (ScalarFn, ScalarFn, ScalarFn) = match name {
        NamedForm::Cos => (|u| u.cos(), |u| -u.sin(), |u| -u.cos()),
        NamedForm::Sin => (|u| u.sin(), |u| u.cos(), |u| -u.sin()),
        NamedForm::Sinh => (|u| u.sinh(), |u| u.cosh(), |u| u.sinh()),
        NamedForm::Cosh => (|u| u.cosh(), |u| u.sinh(), |u| u.cosh()),
        NamedForm::Exp => (|u| u.exp(), |u| u.exp(), |u| u.exp()),
        NamedForm::Affine => (|u| u, |_| 1.0, |_| 0.0),
    };
    Arc::new(FnWarp {
        f: Box::new(move |t| coeff * base.0(rate * t + phase)),
        df: Box::new(move |t| coeff * rate * base.1(rate * t + phase)),
        ddf: Box::new(move |t| coeff * rate * rate * base.2(rate * t + phase)),
    })
}

/// Natural cubic spline with clamped-constant extension outside the knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn fit(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::InvalidParameter(
                "spline warp needs at least three knots".to_string(),
            ));
        }
        let mut sorted = knots.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = sorted.len();
        let ts: Vec<f64> = sorted.iter().map(|k| k.0).collect();
        let ys: Vec<f64> = sorted.iter().map(|k| k.1).collect();
        for w in ts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                return Err(Error::InvalidParameter("duplicate spline knots".to_string()));
            }
        }
        // Tridiagonal system for natural boundary conditions.
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        b[0] = 1.0;
        b[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = ts[i] - ts[i - 1];
            let h1 = ts[i + 1] - ts[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            r[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas algorithm.
        let mut m = vec![0.0; n];
        let mut cp = vec![0.0; n];
        let mut rp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        rp[0] = r[0] / b[0];
        for i in 1..n {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            rp[i] = (r[i] - a[i] * rp[i - 1]) / denom;
        }
        m[n - 1] = rp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = rp[i] - cp[i] * m[i + 1];
        }
        Ok(CubicSpline { ts, ys, m })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.ts.len();
        if t <= self.ts[0] {
            return 0;
        }
        if t >= self.ts[n - 1] {
            return n - 2;
        }
        self.ts.partition_point(|&x| x <= t).saturating_sub(1).min(n - 2)
    }
}

impl Warp for CubicSpline {
    fn f(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x0 = (self.ts[i + 1] - t) / h;
        let x1 = (t - self.ts[i]) / h;
        x0 * self.ys[i]
            + x1 * self.ys[i + 1]
            + ((x0 * x0 * x0 - x0) * self.m[i] + (x1 * x1 * x1 - x1) * self.m[i + 1]) * h * h / 6.0
    }
    fn df(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x0 = (self.ts[i + 1] - t) / h;
        let x1 = (t - self.ts[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * x0 * x0) * self.m[i] + (3.0 * x1 * x1 - 1.0) * self.m[i + 1]) * h / 6.0
    }
    fn ddf(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x0 = (self.ts[i + 1] - t) / h;
        let x1 = (t - self.ts[i]) / h;
        x0 * self.m[i] + x1 * self.m[i + 1]
    }
}
