//! Closed-form geometry of the constant-curvature fiber.
//!
//! Fibers are the simply connected space forms of curvature -1, 0 or +1,
//! presented in normal coordinates around a fixed center. Distances,
//! geodesics and metric components come from the sphere / hyperboloid
//! embeddings, so there is no chart-transition machinery anywhere: a fiber
//! point is a chart vector x with |x| < pi for the sphere and unrestricted
//! otherwise.

use crate::tolerances;
use nalgebra::{DMatrix, DVector};

/// A space form of dimension `dim` and curvature `curvature`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceForm {
    pub curvature: i8,
    pub dim: usize,
}

impl SpaceForm {
    pub fn new(curvature: i8, dim: usize) -> Self {
        assert!(
            (-1..=1).contains(&curvature) && dim >= 1,
            "curvature must be -1, 0 or +1 and dim >= 1"
        );
        SpaceForm { curvature, dim }
    }

    /// sk(r): sin r, r, or sinh r.
    pub fn sk(&self, r: f64) -> f64 {
        match self.curvature {
            1 => r.sin(),
            0 => r,
            _ => r.sinh(),
        }
    }

    /// sk'(r): cos r, 1, or cosh r.
    pub fn ck(&self, r: f64) -> f64 {
        match self.curvature {
            1 => r.cos(),
            0 => 1.0,
            _ => r.cosh(),
        }
    }

    /// sk(r)/r, stable at r = 0.
    fn sk_over_r(&self, r: f64) -> f64 {
        if r.abs() < 1e-6 {
            let k = self.curvature as f64;
            1.0 - k * r * r / 6.0
        } else {
            self.sk(r) / r
        }
    }

    /// Radius beyond which chart coordinates are invalid (pi for the sphere).
    pub fn chart_radius(&self) -> f64 {
        if self.curvature == 1 {
            std::f64::consts::PI - tolerances::SPHERE_CHART_GUARD
        } else {
            f64::INFINITY
        }
    }

    /// Metric components h_ij at chart point x.
    pub fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let r = x.norm();
        if r < 1e-12 {
            return DMatrix::identity(d, d);
        }
        let xin = x / r;
        let tangential = self.sk_over_r(r).powi(2);
        let mut h = DMatrix::identity(d, d) * tangential;
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] += (1.0 - tangential) * xin[i] * xin[j];
            }
        }
        h
    }

    /// sqrt(det h) at chart point x.
    pub fn sqrt_det_metric(&self, x: &DVector<f64>) -> f64 {
        let r = x.norm();
        self.sk_over_r(r).powi(self.dim as i32 - 1)
    }

    /// h-inner product of chart vectors at x.
    pub fn inner(&self, x: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * self.metric(x) * v)[(0, 0)]
    }

    pub fn norm(&self, x: &DVector<f64>, u: &DVector<f64>) -> f64 {
        self.inner(x, u, u).max(0.0).sqrt()
    }

    /// Geodesic distance between chart points.
    pub fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        match self.curvature {
            0 => (y - x).norm(),
            1 => {
                let p = self.embed(x);
                let q = self.embed(y);
                p.dot(&q).clamp(-1.0, 1.0).acos()
            }
            _ => {
                let p = self.embed(x);
                let q = self.embed(y);
                let c = -minkowski_dot(&p, &q);
                c.max(1.0).acosh()
            }
        }
    }

    /// Chart point and unit chart velocity after flowing arclength s from x in
    /// the h-unit chart direction u.
    pub fn flow(&self, x: &DVector<f64>, u: &DVector<f64>, s: f64) -> (DVector<f64>, DVector<f64>) {
        match self.curvature {
            0 => (x + u * s, u.clone()),
            1 => {
                let p = self.embed(x);
                let w = self.push(x, u);
                let point = &p * s.cos() + &w * s.sin();
                let vel = -&p * s.sin() + &w * s.cos();
                let xc = self.unembed(&point);
                let uc = self.pull(&xc, &vel);
                (xc, uc)
            }
            _ => {
                let p = self.embed(x);
                let w = self.push(x, u);
                let point = &p * s.cosh() + &w * s.sinh();
                let vel = &p * s.sinh() + &w * s.cosh();
                let xc = self.unembed(&point);
                let uc = self.pull(&xc, &vel);
                (xc, uc)
            }
        }
    }

    /// Initial velocity (with h-norm = distance) of the geodesic from x to y.
    /// Near-antipodal sphere inputs pick a deterministic direction.
    pub fn log(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        match self.curvature {
            0 => y - x,
            1 => {
                let d = self.distance(x, y);
                if d < 1e-12 {
                    return DVector::zeros(self.dim);
                }
                let p = self.embed(x);
                let q = self.embed(y);
                let sin_d = d.sin();
                if sin_d.abs() < 1e-9 {
                    // Antipodal: any direction is minimizing.
                    let mut u = DVector::zeros(self.dim);
                    u[0] = 1.0;
                    return self.unit(x, &u) * d;
                }
                let w = (&q - &p * d.cos()) / sin_d;
                self.pull(x, &w) * d
            }
            _ => {
                let d = self.distance(x, y);
                if d < 1e-12 {
                    return DVector::zeros(self.dim);
                }
                let p = self.embed(x);
                let q = self.embed(y);
                let w = (&q - &p * d.cosh()) / d.sinh();
                self.pull(x, &w) * d
            }
        }
    }

    /// Normalize a chart vector to h-unit length at x.
    pub fn unit(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let n = self.norm(x, u);
        assert!(n > 0.0, "cannot normalize a zero fiber vector");
        u / n
    }

    /// Measure of the geodesic ball of radius r (chart-centered).
    pub fn ball_measure(&self, r: f64) -> f64 {
        assert!(r > 0.0);
        let d = self.dim;
        if d == 1 {
            return 2.0 * r.min(self.chart_radius());
        }
        let r = r.min(self.chart_radius());
        let integrand = |rho: f64| self.sk(rho).powi(d as i32 - 1);
        let radial = crate::numerics::quad::adaptive_simpson(&integrand, 0.0, r)
            .expect("smooth radial integrand");
        unit_sphere_area(d) * radial
    }

    /// Fiber Christoffel symbols by central differences of the metric;
    /// index order Gamma[k][(i, j)].
    pub fn christoffel_fd(&self, x: &DVector<f64>, step: f64) -> Vec<DMatrix<f64>> {
        let d = self.dim;
        let mut dh = Vec::with_capacity(d);
        for l in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[l] += step;
            xm[l] -= step;
            dh.push((self.metric(&xp) - self.metric(&xm)) / (2.0 * step));
        }
        let hinv = self
            .metric(x)
            .try_inverse()
            .expect("fiber metric is positive definite");
        let mut gamma = vec![DMatrix::zeros(d, d); d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut sum = 0.0;
                    for l in 0..d {
                        sum += hinv[(k, l)] * (dh[i][(j, l)] + dh[j][(i, l)] - dh[l][(i, j)]);
                    }
                    gamma[k][(i, j)] = 0.5 * sum;
                }
            }
        }
        gamma
    }

    // --- embedding internals -------------------------------------------

    /// Embed a chart point into the model hypersurface in R^{dim+1}.
    fn embed(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let r = x.norm();
        let mut p = DVector::zeros(d + 1);
        match self.curvature {
            1 => {
                p[0] = r.cos();
                let s = self.sk_over_r(r);
                for i in 0..d {
                    p[i + 1] = s * x[i];
                }
            }
            _ => {
                p[0] = r.cosh();
                let s = if r < 1e-6 { 1.0 + r * r / 6.0 } else { r.sinh() / r };
                for i in 0..d {
                    p[i + 1] = s * x[i];
                }
            }
        }
        p
    }

    /// Back from the embedded hypersurface to chart coordinates, respecting
    /// the spherical chart guard.
    fn unembed(&self, p: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let tail = p.rows(1, d).into_owned();
        let rho = tail.norm();
        match self.curvature {
            1 => {
                let r = rho.atan2(p[0]);
                if rho < 1e-14 {
                    if p[0] > 0.0 {
                        return DVector::zeros(d);
                    }
                    // Antipode: land just inside the chart along e1.
                    let mut x = DVector::zeros(d);
                    x[0] = self.chart_radius();
                    return x;
                }
                let r = r.min(self.chart_radius());
                tail * (r / rho)
            }
            _ => {
                if rho < 1e-14 {
                    return DVector::zeros(d);
                }
                let r = rho.asinh();
                tail * (r / rho)
            }
        }
    }

    /// Pushforward of a chart vector to an ambient tangent vector.
    fn push(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let m = self.jacobian(x);
        m * u
    }

    /// Pullback of an ambient tangent vector to chart coordinates via the
    /// normal equations of the embedding Jacobian.
    fn pull(&self, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let m = self.jacobian(x);
        let mtm = m.transpose() * &m;
        let rhs = m.transpose() * w;
        mtm.try_inverse().expect("embedding Jacobian has full rank inside the chart") * rhs
    }

    /// (dim+1) x dim Jacobian of the embedding at x.
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let r = x.norm();
        let mut m = DMatrix::zeros(d + 1, d);
        if r < 1e-9 {
            for i in 0..d {
                m[(i + 1, i)] = 1.0;
            }
            return m;
        }
        let xin = x / r;
        match self.curvature {
            1 => {
                let s_r = self.sk_over_r(r);
                // d/dr of sk(r)/r times 1/r, grouped against x (x.u) terms.
                let coeff = (r.cos() - s_r) / r;
                for j in 0..d {
                    m[(0, j)] = -r.sin() * xin[j];
                    for i in 0..d {
                        let kron = if i == j { 1.0 } else { 0.0 };
                        m[(i + 1, j)] = s_r * kron + coeff * xin[i] * x[j];
                    }
                }
            }
            _ => {
                let s_r = if r < 1e-6 { 1.0 + r * r / 6.0 } else { r.sinh() / r };
                let coeff = (r.cosh() - s_r) / r;
                for j in 0..d {
                    m[(0, j)] = r.sinh() * xin[j];
                    for i in 0..d {
                        let kron = if i == j { 1.0 } else { 0.0 };
                        m[(i + 1, j)] = s_r * kron + coeff * xin[i] * x[j];
                    }
                }
            }
        }
        m
    }
}

fn minkowski_dot(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let mut s = -p[0] * q[0];
    for i in 1..p.len() {
        s += p[i] * q[i];
    }
    s
}

/// Surface area of the unit sphere S^{d-1} in R^d.
pub fn unit_sphere_area(d: usize) -> f64 {
    // 2 pi^{d/2} / Gamma(d/2)
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Gamma(m/2) for positive integer m.
fn gamma_half(m: usize) -> f64 {
    match m {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half(m - 2),
    }
}
