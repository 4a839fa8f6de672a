//! Shape operators and mean curvature of slices and graph hypersurfaces.
//!
//! Slices are exact: S = (f'/f) Id. Graphs use the closed-form unit normal
//! and central finite differences for its covariant derivative, with a
//! halved-step check reported alongside the result.

use super::{Hypersurface, Point, Spacetime, Tangent};
use crate::error::{Error, Result};
use crate::tolerances;
use nalgebra::{DMatrix, DVector};

/// Shape operator of a hypersurface at a point, as an endomorphism matrix in
/// the chart basis of the tangent space.
#[derive(Debug, Clone)]
pub struct ShapeOperator {
    pub matrix: DMatrix<f64>,
    pub mean_curvature: f64,
    /// |H - H_halved| of the finite-difference evaluation; None for exact
    /// (slice) results.
    pub fd_mismatch: Option<f64>,
}

impl Spacetime {
    /// Shape operator S = nabla(normal) and mean curvature H = tr S at p.
    pub fn shape_operator(&self, sigma: &Hypersurface, p: &Point) -> Result<ShapeOperator> {
        match sigma {
            Hypersurface::Slice(t0) => {
                let d = self.fiber.dim;
                let lambda = self.df(*t0) / self.f(*t0);
                Ok(ShapeOperator {
                    matrix: DMatrix::identity(d, d) * lambda,
                    mean_curvature: d as f64 * lambda,
                    fd_mismatch: None,
                })
            }
            Hypersurface::Graph(u) => {
                let step = tolerances::GRAPH_FD_STEP * (1.0 + p.x.norm());
                let (s1, h1) = self.graph_shape_fd(u.as_ref(), &p.x, step)?;
                let (_, h2) = self.graph_shape_fd(u.as_ref(), &p.x, 0.5 * step)?;
                Ok(ShapeOperator {
                    mean_curvature: h1,
                    matrix: s1,
                    fd_mismatch: Some((h1 - h2).abs()),
                })
            }
        }
    }

    /// Future unit normal of the hypersurface at fiber point x.
    pub fn graph_normal(&self, sigma: &Hypersurface, x: &DVector<f64>) -> Result<Tangent> {
        match sigma {
            Hypersurface::Slice(t0) => {
                let p = Point::new(*t0, x.clone());
                Ok(self.tangent(&p, 1.0, DVector::zeros(self.fiber.dim)))
            }
            Hypersurface::Graph(u) => {
                let step = tolerances::GRAPH_FD_STEP * (1.0 + x.norm());
                let (a, b_vec, t0) = self.graph_normal_components(u.as_ref(), x, step)?;
                let p = Point::new(t0, x.clone());
                Ok(self.tangent(&p, a, b_vec))
            }
        }
    }

    /// (A, B, u(x)) with normal nu = A d/dt + B^k d/dx_k.
    fn graph_normal_components(
        &self,
        u: &dyn Fn(&DVector<f64>) -> f64,
        x: &DVector<f64>,
        step: f64,
    ) -> Result<(f64, DVector<f64>, f64)> {
        let d = self.fiber.dim;
        let t0 = u(x);
        if !self.contains_t(t0) {
            return Err(Error::DomainExit(t0));
        }
        let mut du = DVector::zeros(d);
        for i in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            du[i] = (u(&xp) - u(&xm)) / (2.0 * step);
        }
        let h_inv = self
            .fiber
            .metric(x)
            .try_inverse()
            .expect("fiber metric is positive definite");
        let grad_sq = (du.transpose() * &h_inv * &du)[(0, 0)];
        let f = self.f(t0);
        if grad_sq >= f * f {
            return Err(Error::Precondition(format!(
                "graph is not spacelike at x = {x:?}: |du|^2 = {grad_sq} >= f^2 = {}",
                f * f
            )));
        }
        let a = 1.0 / (1.0 - grad_sq / (f * f)).sqrt();
        let b = (&h_inv * &du) * (a / (f * f));
        Ok((a, b, t0))
    }

    /// Shape endomorphism (in the graph chart basis X_i = (du_i, e_i)) and
    /// mean curvature by covariant central differences of the unit normal.
    fn graph_shape_fd(
        &self,
        u: &dyn Fn(&DVector<f64>) -> f64,
        x: &DVector<f64>,
        step: f64,
    ) -> Result<(DMatrix<f64>, f64)> {
        let d = self.fiber.dim;
        let (a0, b0, t0) = self.graph_normal_components(u, x, step)?;
        let f = self.f(t0);
        let fp = self.df(t0);
        let h = self.fiber.metric(x);
        let gamma = self.fiber.christoffel_fd(x, step);

        // du at x (needed for X_i's time component and the induced metric).
        let mut du = DVector::zeros(d);
        for i in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            du[i] = (u(&xp) - u(&xm)) / (2.0 * step);
        }

        // Coordinate derivatives of the normal components along the graph.
        let mut da = DVector::zeros(d);
        let mut db = DMatrix::zeros(d, d); // db[(k, i)] = d_i B^k
        for i in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            let (ap, bp, _) = self.graph_normal_components(u, &xp, step)?;
            let (am, bm, _) = self.graph_normal_components(u, &xm, step)?;
            da[i] = (ap - am) / (2.0 * step);
            for k in 0..d {
                db[(k, i)] = (bp[k] - bm[k]) / (2.0 * step);
            }
        }

        // Covariant derivative nabla_{X_i} nu in (t, fiber) components.
        let hb = &h * &b0;
        let mut grad_t = DVector::zeros(d); // t-component per direction i
        let mut grad_f = DMatrix::zeros(d, d); // fiber component k per direction i
        for i in 0..d {
            grad_t[i] = da[i] + f * fp * hb[i];
            for k in 0..d {
                let mut v = db[(k, i)] + (fp / f) * (du[i] * b0[k]) // Gamma^k_{tj} X^t nu^j
                    + (fp / f) * a0 * kron(k, i); // Gamma^k_{jt} X^j nu^t
                for l in 0..d {
                    v += gamma[k][(i, l)] * b0[l];
                }
                grad_f[(k, i)] = v;
            }
        }

        // Induced metric and M_ij = g(nabla_{X_i} nu, X_j).
        let f2 = f * f;
        let mut g_sigma = DMatrix::zeros(d, d);
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                g_sigma[(i, j)] = -du[i] * du[j] + f2 * h[(i, j)];
                let mut fiber_part = 0.0;
                for k in 0..d {
                    fiber_part += grad_f[(k, i)] * h[(k, j)];
                }
                m[(i, j)] = -grad_t[i] * du[j] + f2 * fiber_part;
            }
        }
        let m_sym = (&m + m.transpose()) * 0.5;
        let g_inv = g_sigma
            .try_inverse()
            .ok_or_else(|| Error::Precondition("degenerate induced metric".to_string()))?;
        let s = &g_inv * m_sym.transpose();
        let h_mean = s.trace();
        Ok((s, h_mean))
    }
}

fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}
