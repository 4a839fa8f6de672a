//! Shared test support: an independent finite-difference curvature oracle
//! and random model-parameter sampling.
#![allow(dead_code)] // each test binary uses a different subset
//!
//! The oracle computes Ricci curvature purely from metric component samples
//! via Christoffel symbols, with no reference to the closed-form curvature
//! path it is used to check.

use lorentz_comparison::spacetime::{Point, Spacetime, Tangent};
use nalgebra::{DMatrix, DVector};

/// Five-point derivative of a matrix-valued function along coordinate mu.
fn stencil5(
    eval: &dyn Fn(&[f64]) -> DMatrix<f64>,
    coords: &[f64],
    mu: usize,
    h: f64,
) -> DMatrix<f64> {
    let at = |delta: f64| {
        let mut c = coords.to_vec();
        c[mu] += delta;
        eval(&c)
    };
    (-at(2.0 * h) + at(h) * 8.0 - at(-h) * 8.0 + at(-2.0 * h)) / (12.0 * h)
}

/// Christoffel symbols at (t, x) from five-point differences of the metric.
fn christoffel(st: &Spacetime, coords: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    let n = coords.len();
    let g_at = |c: &[f64]| -> DMatrix<f64> {
        let p = Point::new(c[0], DVector::from_column_slice(&c[1..]));
        st.metric(&p)
    };
    let mut dg = Vec::with_capacity(n);
    for mu in 0..n {
        dg.push(stencil5(&g_at, coords, mu, h));
    }
    let g_inv = g_at(coords).try_inverse().expect("metric is invertible");
    let mut gamma = vec![DMatrix::zeros(n, n); n];
    for lam in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                let mut s = 0.0;
                for rho in 0..n {
                    s += g_inv[(lam, rho)]
                        * (dg[mu][(rho, nu)] + dg[nu][(rho, mu)] - dg[rho][(mu, nu)]);
                }
                gamma[lam][(mu, nu)] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Ricci tensor components at a point by finite differences of the
/// Christoffel symbols.
pub fn fd_ricci_tensor(st: &Spacetime, p: &Point) -> DMatrix<f64> {
    let n = st.fiber.dim + 1;
    let mut coords = vec![p.t];
    coords.extend(p.x.iter());
    let h1 = 1e-4;
    let h2 = 1e-4;
    let gamma0 = christoffel(st, &coords, h1);
    // dGamma[mu][lam][(nu, sig)] = d_mu Gamma^lam_{nu sig}
    let mut dgamma = Vec::with_capacity(n);
    for mu in 0..n {
        let mut per_lam = Vec::with_capacity(n);
        for lam in 0..n {
            let eval = |c: &[f64]| christoffel(st, c, h1)[lam].clone();
            per_lam.push(stencil5(&eval, &coords, mu, h2));
        }
        dgamma.push(per_lam);
    }
    let mut ric = DMatrix::zeros(n, n);
    for sig in 0..n {
        for nu in 0..n {
            let mut r = 0.0;
            for mu in 0..n {
                r += dgamma[mu][mu][(nu, sig)] - dgamma[nu][mu][(mu, sig)];
                for lam in 0..n {
                    r += gamma0[mu][(mu, lam)] * gamma0[lam][(nu, sig)]
                        - gamma0[mu][(nu, lam)] * gamma0[lam][(mu, sig)];
                }
            }
            ric[(sig, nu)] = r;
        }
    }
    ric
}

/// Ricci quadratic form via the finite-difference oracle.
pub fn fd_ricci(st: &Spacetime, p: &Point, v: &Tangent) -> f64 {
    let ric = fd_ricci_tensor(st, p);
    let n = st.fiber.dim + 1;
    let mut vv = vec![v.dt];
    vv.extend(v.dx.iter());
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += ric[(a, b)] * vv[a] * vv[b];
        }
    }
    s
}

/// Random model parameters covering every catalog regime.
pub fn random_model_params(rng: &mut impl rand::Rng) -> lorentz_comparison::ModelParams {
    let n = 2 + (rng.random::<u32>() % 3);
    let regime = rng.random::<u32>() % 10;
    let nm1 = (n - 1) as f64;
    let (kappa, beta) = match regime {
        0 => {
            // kappa < 0, |beta| below the boundary
            let kappa = -(0.2 + 2.0 * rng.random::<f64>());
            let q = (-kappa).sqrt();
            (kappa, nm1 * q * (2.0 * rng.random::<f64>() - 1.0) * 0.95)
        }
        1 => {
            let kappa = -(0.2 + 2.0 * rng.random::<f64>());
            let q = (-kappa).sqrt();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (kappa, sign * nm1 * q)
        }
        2 => {
            let kappa = -(0.2 + 2.0 * rng.random::<f64>());
            let q = (-kappa).sqrt();
            (kappa, nm1 * q * (1.05 + 2.0 * rng.random::<f64>()))
        }
        3 => {
            let kappa = -(0.2 + 2.0 * rng.random::<f64>());
            let q = (-kappa).sqrt();
            (kappa, -nm1 * q * (1.05 + 2.0 * rng.random::<f64>()))
        }
        4 => (0.0, 0.0),
        5 => (0.0, 0.3 + 2.0 * rng.random::<f64>()),
        6 => (0.0, -(0.3 + 2.0 * rng.random::<f64>())),
        7 => (0.5 + 2.0 * rng.random::<f64>(), 0.3 + 2.0 * rng.random::<f64>()),
        8 => (0.5 + 2.0 * rng.random::<f64>(), -(0.3 + 2.0 * rng.random::<f64>())),
        _ => (0.5 + 2.0 * rng.random::<f64>(), 0.0),
    };
    lorentz_comparison::ModelParams { kappa, beta, n }
}
