use super::SeriesConfig;
use crate::error::{Error, Result};

/// Lerch transcendent Φ(z, s, a) = Σ_{n≥0} zⁿ/(n+a)^s for 0 ≤ z < 1, a > 0.
pub fn lerch_phi(z: f64, s: f64, a: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("lerch_phi requires 0 <= z < 1, got {z}")));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("lerch_phi requires a > 0, got {a}")));
    }
    let mut sum = a.powf(-s);
    if z == 0.0 {
        return Ok(sum);
    }
    let mut zn = 1.0;
    for n in 1..cfg.max_terms {
        let nf = n as f64;
        zn *= z;
        let term = zn / (nf + a).powf(s);
        sum += term;
        // Bound on the ratio of all later consecutive terms.
        let rho = if s >= 0.0 {
            z
        } else {
            z * ((nf + 1.0 + a) / (nf + a)).powf(-s)
        };
        if rho < 1.0 {
            let tail = term * rho / (1.0 - rho);
            if tail <= cfg.rel_tol * sum.abs() || tail <= cfg.abs_tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence {
        func: "lerch_phi",
        terms: cfg.max_terms,
    })
}
