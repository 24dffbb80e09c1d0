//! Special functions: Γ, ψ, Pochhammer symbols, ₂F₁ with its logarithmic
//! cases, Jacobi and Gegenbauer polynomials and the Lerch transcendent.

mod gamma;
mod hyp;
mod lerch;
mod poly;

pub use gamma::{binomial, digamma, gamma_fn, gamma_ratio, ln_gamma, pochhammer, rgamma, sin_pi};
pub use hyp::{gauss_series, hyp2f1, hyp2f1_c, hyp2f1_route, hyp2f1_t, Route, DEGENERATE_THRESHOLD};
pub use lerch::lerch_phi;
pub use poly::{gegenbauer_c, gegenbauer_c_t, jacobi_p, jacobi_p_t, jacobi_sequence};

use serde::{Deserialize, Serialize};

/// Truncation control for every infinite series in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub max_terms: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            max_terms: 20_000,
            rel_tol: 1e-17,
            abs_tol: 1e-300,
        }
    }
}

impl SeriesConfig {
    pub fn new(max_terms: usize, rel_tol: f64, abs_tol: f64) -> crate::Result<Self> {
        if max_terms == 0 || !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(crate::Error::Domain(
                "series config needs max_terms >= 1 and positive tolerances".into(),
            ));
        }
        Ok(SeriesConfig {
            max_terms,
            rel_tol,
            abs_tol,
        })
    }
}
