//! Klein–Gordon products of modes, Gram matrices, and the regularized
//! product on singleton and gauge modes.

use crate::error::{Error, Result};
use crate::modes::{frequency, radial_profile, Family, ModeSpec, RadialProfile};
use crate::quadrature::{radial_nodes, QuadratureConfig};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Nodes this close to an endpoint are dropped; their contribution to an
/// integrable integrand is below double precision.
const TINY: f64 = 1e-100;

/// ∫₀^{π/2} (tan r / a)^{d−2} f₁ f₂ dr.
pub fn radial_overlap(
    d: u32,
    a: f64,
    f1: &RadialProfile,
    f2: &RadialProfile,
    q: &QuadratureConfig,
) -> Result<f64> {
    if f1.is_zero() || f2.is_zero() {
        return Ok(0.0);
    }
    let dm = d as f64 - 2.0;
    let p = f1.exponent_at_origin + f2.exponent_at_origin + dm;
    let qe = f1.exponent_at_boundary + f2.exponent_at_boundary - dm;
    if qe <= -1.0 {
        return Err(Error::Divergent(format!(
            "integrand behaves as cos^{qe} r at the boundary"
        )));
    }
    let nodes = radial_nodes(q, Some((p, qe)))?;
    Ok(nodes
        .iter()
        .filter(|n| n.s.min(n.c) > TINY)
        .map(|n| {
            let h = n.c.powf(0.5 * dm);
            n.w * (n.s / a).powf(dm) * (f1.eval_sc(n.s, n.c) / h) * (f2.eval_sc(n.s, n.c) / h)
        })
        .sum())
}

fn check_pair(m1: &ModeSpec, m2: &ModeSpec) -> Result<()> {
    if m1.d != m2.d || m1.a != m2.a {
        return Err(Error::InvalidSpec(
            "inner product needs modes on the same space (d, a)".into(),
        ));
    }
    Ok(())
}

/// (F₁, F₂) at time t₀, with unit-normalized zonal harmonics.
pub fn kg_inner_at(m1: &ModeSpec, m2: &ModeSpec, t0: f64, q: &QuadratureConfig) -> Result<Complex64> {
    check_pair(m1, m2)?;
    if m1.l != m2.l {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (w1, w2) = (frequency(m1)?, frequency(m2)?);
    let (f1, f2) = (radial_profile(m1)?, radial_profile(m2)?);
    let v = radial_overlap(m1.d, m1.a, &f1, &f2, q)?;
    Ok((w1 + w2) * v * Complex64::from_polar(1.0, (w1 - w2) * t0))
}

pub fn kg_inner(m1: &ModeSpec, m2: &ModeSpec, q: &QuadratureConfig) -> Result<Complex64> {
    kg_inner_at(m1, m2, 0.0, q)
}

pub fn gram_matrix(
    family: Family,
    d: u32,
    e0: f64,
    l: u32,
    kmax: u32,
    a: f64,
    q: &QuadratureConfig,
) -> Result<DMatrix<f64>> {
    if !matches!(
        family,
        Family::Dirichlet | Family::Neumann | Family::DD2 | Family::DN2 | Family::ND2 | Family::NN2
    ) && family.forced_e0(d).is_none()
        && family != Family::Degenerate
    {
        return Err(Error::InvalidSpec(format!("no Gram matrix for {family}")));
    }
    let specs: Vec<ModeSpec> = (0..=kmax)
        .map(|k| ModeSpec::new(family, d, e0, l, k, a))
        .collect::<Result<_>>()?;
    let n = specs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let vals: Vec<((usize, usize), f64)> = pairs
        .par_iter()
        .map(|&(i, j)| kg_inner(&specs[i], &specs[j], q).map(|v| ((i, j), v.re)))
        .collect::<Result<_>>()?;
    let mut g = DMatrix::zeros(n, n);
    for ((i, j), v) in vals {
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    Ok(g)
}

pub fn max_deviation_from_identity(g: &DMatrix<f64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            m = m.max((g[(i, j)] - target).abs());
        }
    }
    m
}

/// Members of the space V on which the regularized product is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingletonSector {
    Singleton { l: u32 },
    Gauge { l: u32, k: u32 },
}

impl SingletonSector {
    fn l(&self) -> u32 {
        match *self {
            SingletonSector::Singleton { l } | SingletonSector::Gauge { l, .. } => l,
        }
    }

    /// The profile continued to E₀ = (d−3)/2 + ε and its frequency.
    ///
    /// Gauge mode k is the limit of the normalized Neumann mode k+1; the
    /// singleton is the bare k = 0 Neumann profile sin^l r cos^{E₀} r.
    pub fn continued(&self, d: u32, a: f64, eps: f64) -> Result<(RadialProfile, f64)> {
        let e0 = 0.5 * (d as f64 - 3.0) + eps;
        match *self {
            SingletonSector::Singleton { l } => {
                let spec = ModeSpec::new(Family::Neumann, d, e0, l, 0, a)?;
                Ok((radial_profile(&spec)?.unnormalized(), frequency(&spec)?))
            }
            SingletonSector::Gauge { l, k } => {
                let spec = ModeSpec::new(Family::Neumann, d, e0, l, k + 1, a)?;
                Ok((radial_profile(&spec)?, frequency(&spec)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedProduct {
    pub eps: Vec<f64>,
    /// ε · (KG product) at each ε.
    pub samples: Vec<f64>,
    /// Successive polynomial extrapolations to ε = 0.
    pub estimates: Vec<f64>,
    pub value: f64,
}

/// Neville extrapolation of (xᵢ, yᵢ) to x = 0, returning each diagonal.
fn neville_to_zero(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut p = y.to_vec();
    let mut out = vec![p[0]];
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
        out.push(p[0]);
    }
    out
}

pub fn regularized_inner(
    d: u32,
    a: f64,
    m1: SingletonSector,
    m2: SingletonSector,
    eps_sequence: &[f64],
    q: &QuadratureConfig,
) -> Result<RegularizedProduct> {
    if d < 3 {
        return Err(Error::InvalidSpec("the singleton sector requires d >= 3".into()));
    }
    if eps_sequence.len() < 2 || eps_sequence.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
        return Err(Error::Domain(
            "need at least two epsilons in (0, 0.5)".into(),
        ));
    }
    if eps_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("epsilon sequence must be decreasing".into()));
    }
    let mut samples = Vec::with_capacity(eps_sequence.len());
    for &eps in eps_sequence {
        if m1.l() != m2.l() {
            samples.push(0.0);
            continue;
        }
        let (f1, w1) = m1.continued(d, a, eps)?;
        let (f2, w2) = m2.continued(d, a, eps)?;
        samples.push(eps * (w1 + w2) * radial_overlap(d, a, &f1, &f2, q)?);
    }
    let estimates = neville_to_zero(eps_sequence, &samples);
    let n = estimates.len();
    let value = estimates[n - 1];
    let spread = (estimates[n - 1] - estimates[n - 2]).abs();
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if spread > 1e-3 * scale {
        return Err(Error::Extrapolation(format!(
            "successive estimates {} and {} disagree",
            estimates[n - 2],
            estimates[n - 1]
        )));
    }
    Ok(RegularizedProduct {
        eps: eps_sequence.to_vec(),
        samples,
        estimates,
        value,
    })
}

/// a^{2−d}(l + (d−3)/2), the singleton norm for unit-coefficient modes.
pub fn singleton_norm_formula(d: u32, l: u32, a: f64) -> f64 {
    a.powf(2.0 - d as f64) * (l as f64 + 0.5 * (d as f64 - 3.0))
}

/// The unregularized KG integral of the continued singleton at ε.
pub fn singleton_norm_integral(d: u32, l: u32, a: f64, eps: f64, q: &QuadratureConfig) -> Result<f64> {
    let (f, w) = SingletonSector::Singleton { l }.continued(d, a, eps)?;
    Ok(2.0 * w * radial_overlap(d, a, &f, &f, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Scheme;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn neumann_norm_and_orthogonality() {
        let f0 = ModeSpec::new(Family::Neumann, 4, 3.0, 0, 0, 1.0).unwrap();
        let f1 = ModeSpec::new(Family::Neumann, 4, 3.0, 0, 1, 1.0).unwrap();
        assert!((kg_inner(&f0, &f0, &q()).unwrap().re - 1.0).abs() < 1e-12);
        assert!(kg_inner(&f0, &f1, &q()).unwrap().norm() < 1e-13);
        let gl = QuadratureConfig::gauss_legendre(200);
        assert!((kg_inner(&f0, &f0, &gl).unwrap().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gram_identity() {
        let g = gram_matrix(Family::Dirichlet, 4, 2.0, 1, 4, 1.0, &q()).unwrap();
        assert!(max_deviation_from_identity(&g) < 1e-12);
        let g = gram_matrix(Family::NN2, 2, 0.7, 0, 3, 1.0, &q()).unwrap();
        assert!(max_deviation_from_identity(&g) < 1e-12);
        let g = gram_matrix(Family::Neumann, 4, 3.0, 0, 0, 1.0, &q()).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert!((g[(0, 0)] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_neumann_overlap_is_finite() {
        let a = ModeSpec::new(Family::Dirichlet, 4, 2.0, 0, 0, 1.0).unwrap();
        let b = ModeSpec::new(Family::Neumann, 4, 2.0, 0, 0, 1.0).unwrap();
        let v = kg_inner(&a, &b, &q()).unwrap();
        assert!(v.norm().is_finite() && v.norm() > 1e-3);
    }

    #[test]
    fn hermitian_and_time_phase() {
        let a = ModeSpec::new(Family::Neumann, 5, 2.5, 1, 0, 1.0).unwrap();
        let b = ModeSpec::new(Family::Dirichlet, 5, 2.5, 1, 1, 1.0).unwrap();
        let ab = kg_inner_at(&a, &b, 0.7, &q()).unwrap();
        let ba = kg_inner_at(&b, &a, 0.7, &q()).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
    }

    #[test]
    fn singletons_diverge() {
        let s = ModeSpec::fixed(Family::Singleton, 4, 0, 0, 1.0).unwrap();
        assert!(matches!(kg_inner(&s, &s, &q()), Err(Error::Divergent(_))));
        let cfg = QuadratureConfig::tanh_sinh(200);
        assert!(kg_inner(&s, &s, &cfg).is_err());
    }

    #[test]
    fn regularized_norms() {
        let eps = [1e-2, 1e-3, 1e-4];
        let cfg = q();
        for &(d, l, want) in &[(4u32, 0u32, 0.5), (5, 2, 3.0), (3, 1, 1.0)] {
            let s = SingletonSector::Singleton { l };
            let r = regularized_inner(d, 1.0, s, s, &eps, &cfg).unwrap();
            assert!((r.value - want).abs() < 1e-8, "{d} {l}: {r:?}");
            assert_eq!(want, singleton_norm_formula(d, l, 1.0));
        }
        for k in 0..4 {
            let g = SingletonSector::Gauge { l: 1, k };
            let r = regularized_inner(4, 1.0, g, g, &eps, &cfg).unwrap();
            assert!(r.value.abs() < 1e-6);
            let s = SingletonSector::Singleton { l: 1 };
            let r = regularized_inner(4, 1.0, s, g, &eps, &cfg).unwrap();
            assert!(r.value.abs() < 1e-6);
        }
        let s = SingletonSector::Singleton { l: 0 };
        assert!(regularized_inner(4, 1.0, s, s, &[1e-3, 1e-2], &cfg).is_err());
    }

    #[test]
    fn singleton_integral_grows_as_inverse_eps() {
        let cfg = q();
        let (e1, e2) = (1e-3, 1e-4);
        let i1 = singleton_norm_integral(5, 1, 1.0, e1, &cfg).unwrap();
        let i2 = singleton_norm_integral(5, 1, 1.0, e2, &cfg).unwrap();
        let slope = (i2.ln() - i1.ln()) / (e2.ln() - e1.ln());
        assert!((slope + 1.0).abs() < 0.02);
        let ts = QuadratureConfig { scheme: Scheme::TanhSinh, nodes: 400, ..cfg };
        let i3 = singleton_norm_integral(5, 1, 1.0, 0.1, &ts).unwrap();
        let i4 = singleton_norm_integral(5, 1, 1.0, 0.1, &cfg).unwrap();
        assert!((i3 / i4 - 1.0).abs() < 1e-8, "{i3} {i4}");
    }
}
