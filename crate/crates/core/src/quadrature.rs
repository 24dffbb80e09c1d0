//! Quadrature rules on r ∈ (0, π/2).
//!
//! Nodes carry `sin r` and `cos r` computed from the exact distance to the
//! nearer endpoint, so integrands with algebraic endpoint behavior keep full
//! relative accuracy.

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussLegendre,
    TanhSinh,
    /// Gauss–Jacobi in x = cos 2r with weight exponents matched to the
    /// integrand's endpoint powers.
    GaussJacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub endpoint_offset: f64,
    pub scheme: Scheme,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes: 64,
            endpoint_offset: 1e-300,
            scheme: Scheme::GaussJacobi,
        }
    }
}

impl QuadratureConfig {
    pub fn new(nodes: usize, endpoint_offset: f64, scheme: Scheme) -> Result<Self> {
        let c = QuadratureConfig {
            nodes,
            endpoint_offset,
            scheme,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::Domain(format!(
                "quadrature needs at least 8 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.endpoint_offset > 0.0 && self.endpoint_offset < 0.1) {
            return Err(Error::Domain(format!(
                "endpoint offset must lie in (0, 0.1), got {}",
                self.endpoint_offset
            )));
        }
        Ok(())
    }

    pub fn tanh_sinh(nodes: usize) -> Self {
        QuadratureConfig {
            nodes,
            scheme: Scheme::TanhSinh,
            ..Default::default()
        }
    }

    pub fn gauss_legendre(nodes: usize) -> Self {
        QuadratureConfig {
            nodes,
            endpoint_offset: 1e-12,
            scheme: Scheme::GaussLegendre,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialNode {
    pub r: f64,
    pub s: f64,
    pub c: f64,
    pub w: f64,
}

impl RadialNode {
    fn from_r(r: f64, w: f64) -> Self {
        RadialNode {
            r,
            s: r.sin(),
            c: r.cos(),
            w,
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Jacobi nodes and weights for (1−x)^α (1+x)^β on [−1, 1], by the
/// Golub–Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Divergent(format!(
            "Jacobi weight exponents ({alpha}, {beta}) must exceed -1"
        )));
    }
    let ab = alpha + beta;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        m[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let off = if k == 0 {
                (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
            } else {
                let t = 2.0 * j + ab;
                (4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (t * t * (t + 1.0) * (t - 1.0)))
                    .sqrt()
            };
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let (lg_a, _) = ln_gamma(alpha + 1.0)?;
    let (lg_b, _) = ln_gamma(beta + 1.0)?;
    let (lg_ab, _) = ln_gamma(ab + 2.0)?;
    let mu0 = ((ab + 1.0) * 2f64.ln() + lg_a + lg_b - lg_ab).exp();
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Nodes for ∫₀^{π/2} F(r) dr.
///
/// `endpoint_powers` = (p, q) declares F ~ sin^p r near 0 and cos^q r near π/2;
/// it is required by [`Scheme::GaussJacobi`] and ignored otherwise.
pub fn radial_nodes(
    cfg: &QuadratureConfig,
    endpoint_powers: Option<(f64, f64)>,
) -> Result<Vec<RadialNode>> {
    cfg.validate()?;
    match cfg.scheme {
        Scheme::GaussLegendre => {
            let (x, w) = gauss_legendre(cfg.nodes);
            let half = 0.5 * (FRAC_PI_2 - cfg.endpoint_offset);
            Ok(x.iter()
                .zip(&w)
                .map(|(&xi, &wi)| RadialNode::from_r(half * (xi + 1.0), half * wi))
                .collect())
        }
        Scheme::TanhSinh => Ok(tanh_sinh(cfg.nodes, cfg.endpoint_offset)),
        Scheme::GaussJacobi => {
            let (p, q) = endpoint_powers.ok_or_else(|| {
                Error::Domain("Gauss–Jacobi quadrature needs endpoint powers".into())
            })?;
            let alpha = 0.5 * (p - 1.0);
            let beta = 0.5 * (q - 1.0);
            let (x, w) = gauss_jacobi(cfg.nodes, alpha, beta)?;
            // dr = dx / (4 s c), s² = (1−x)/2, c² = (1+x)/2.
            let k = 0.25 * 2f64.powf(-0.5 * (p + q - 2.0));
            Ok(x.iter()
                .zip(&w)
                .map(|(&xi, &wi)| {
                    let s = (0.5 * (1.0 - xi)).sqrt();
                    let c = (0.5 * (1.0 + xi)).sqrt();
                    RadialNode {
                        r: s.atan2(c),
                        s,
                        c,
                        w: wi * k / (s.powf(p) * c.powf(q)),
                    }
                })
                .collect())
        }
    }
}

fn tanh_sinh(n: usize, offset: f64) -> Vec<RadialNode> {
    let tmax = 6.1;
    let h = 2.0 * tmax / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = -tmax + i as f64 * h;
        let u = PI * t.sinh();
        let e = (-u.abs()).exp();
        // Distance to the nearer endpoint and the Jacobian.
        let near = FRAC_PI_2 * e / (1.0 + e);
        let jac = FRAC_PI_2 * PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
        if near < offset || jac == 0.0 {
            continue;
        }
        let node = if u < 0.0 {
            RadialNode {
                r: near,
                s: near.sin(),
                c: near.cos(),
                w: h * jac,
            }
        } else {
            RadialNode {
                r: FRAC_PI_2 - near,
                s: near.cos(),
                c: near.sin(),
                w: h * jac,
            }
        };
        out.push(node);
    }
    out
}

/// Accurate (sin r, cos r) for r in [0, π/2].
pub fn trig_pair(r: f64) -> (f64, f64) {
    if r <= FRAC_PI_4 {
        (r.sin(), r.cos())
    } else {
        let u = FRAC_PI_2 - r;
        (u.cos(), u.sin())
    }
}
