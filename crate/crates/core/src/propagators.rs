//! Two-point functions of the invariant Z = sec r cos t (second point at the
//! origin): closed forms, their ODEs, mode sums and the triplet split of D_FF.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::jet::{Jet, Real};
use crate::modes::{frequency, radial_profile, Family, ModeSpec, Residual};
use crate::specfun::{gamma_fn, hyp2f1_t, jacobi_sequence, SeriesConfig};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    DirichletClosed,
    NeumannClosed,
    SingletonLimit,
    FlatoFronsdal,
    W1,
    W2,
    /// c1·Z^{E₀+1−d}₂F₁(…;1/Z²) + c2·Z^{−E₀}₂F₁(…;1/Z²).
    GeneralZ { c1: f64, c2: f64 },
}

impl Kind {
    pub fn fixes_e0(self) -> bool {
        matches!(self, Kind::SingletonLimit | Kind::FlatoFronsdal | Kind::W1 | Kind::W2)
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dirichlet" | "dirichlet_closed" => Kind::DirichletClosed,
            "neumann" | "neumann_closed" => Kind::NeumannClosed,
            "singleton" | "singleton_limit" => Kind::SingletonLimit,
            "ff" | "flato_fronsdal" => Kind::FlatoFronsdal,
            "w1" => Kind::W1,
            "w2" => Kind::W2,
            "general" | "general_z" => Kind::GeneralZ { c1: 1.0, c2: 0.0 },
            _ => return Err(Error::InvalidSpec(format!("unknown propagator kind '{s}'"))),
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::DirichletClosed => "dirichlet",
            Kind::NeumannClosed => "neumann",
            Kind::SingletonLimit => "singleton",
            Kind::FlatoFronsdal => "ff",
            Kind::W1 => "w1",
            Kind::W2 => "w2",
            Kind::GeneralZ { .. } => "general",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorKind {
    pub kind: Kind,
    pub d: u32,
    pub e0: f64,
    pub a: f64,
}

impl PropagatorKind {
    /// Kinds living at E₀ = (d−3)/2 ignore `e0` and store that value.
    pub fn new(kind: Kind, d: u32, e0: f64, a: f64) -> Result<Self> {
        let e0 = if kind.fixes_e0() { 0.5 * (d as f64 - 3.0) } else { e0 };
        let p = PropagatorKind { kind, d, e0, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if !self.e0.is_finite() {
            return bad("E0 must be finite".into());
        }
        let d = self.d as f64;
        match self.kind {
            _ if self.d < 2 => bad("d must be at least 2".into()),
            Kind::W2 if self.d == 3 => bad("w2 has a 1/(d−3) term and is undefined at d = 3".into()),
            k if k.fixes_e0() && self.d < 3 => bad(format!("{k} requires d >= 3")),
            Kind::DirichletClosed if self.e0 >= 0.5 * (d + 1.0) => {
                bad(format!("Dirichlet propagator needs E0 < (d+1)/2, got {}", self.e0))
            }
            Kind::NeumannClosed if self.e0 <= 0.5 * (d - 3.0) => {
                bad(format!("Neumann propagator needs E0 > (d-3)/2, got {}", self.e0))
            }
            _ => Ok(()),
        }
    }

    /// The prefactor of the Dirichlet or Neumann closed form; the fixed
    /// constant of the singleton limit.
    pub fn normalization(&self) -> Result<f64> {
        let (d, e0) = (self.d as f64, self.e0);
        let ad = self.a.powf(d - 2.0);
        let pi = PI.powf(0.5 * (d - 1.0));
        match self.kind {
            Kind::DirichletClosed => Ok(ad / (2f64.powf(d - e0) * pi) * gamma_fn(d - 1.0 - e0)?
                / gamma_fn(0.5 * (d + 1.0) - e0)?),
            Kind::NeumannClosed => Ok(ad / (2f64.powf(e0 + 1.0) * pi) * gamma_fn(e0)?
                / gamma_fn(e0 - 0.5 * (d - 3.0))?),
            Kind::SingletonLimit => Ok(singleton_constant(self.d, self.a)),
            _ => Ok(1.0),
        }
    }

    /// D(z) with z a [`Real`] whose value is `z0 > 1`.
    pub fn eval_t<T: Real>(&self, z: T, z0: f64) -> Result<T> {
        if !(z0 > 1.0) || !z0.is_finite() {
            return Err(Error::Domain(format!("closed forms need Z > 1, got {z0}")));
        }
        let (d, e0) = (self.d as f64, self.e0);
        let x = (z * z).powi(-1);
        let x0 = 1.0 / (z0 * z0);
        let omx0 = (z0 - 1.0) * (z0 + 1.0) * x0;
        let cfg = SeriesConfig::default();
        let f = |a: f64, b: f64, c: f64| hyp2f1_t(a, b, c, x, x0, omx0, &cfg);
        let b1 = || -> Result<T> {
            Ok(z.powf(e0 + 1.0 - d)
                * f(0.5 * (d - 1.0 - e0), 0.5 * (d - e0), 0.5 * (d + 1.0) - e0)?)
        };
        let b2 = || -> Result<T> {
            Ok(z.powf(-e0) * f(0.5 * e0, 0.5 * (e0 + 1.0), e0 - 0.5 * (d - 3.0))?)
        };
        let w1 = || -> Result<T> {
            Ok(z.powf(-0.5 * (d + 1.0)) * f(0.25 * (d + 1.0), 0.25 * (d + 3.0), 2.0)?)
        };
        match self.kind {
            Kind::DirichletClosed => Ok(b1()? * self.normalization()?),
            Kind::NeumannClosed => Ok(b2()? * self.normalization()?),
            Kind::GeneralZ { c1, c2 } => {
                let mut v = T::cst(0.0);
                if c1 != 0.0 {
                    v = v + b1()? * c1;
                }
                if c2 != 0.0 {
                    v = v + b2()? * c2;
                }
                Ok(v)
            }
            Kind::SingletonLimit => Ok(w1()? * self.normalization()?),
            Kind::W1 => w1(),
            Kind::W2 => w2_t(self.d, z, z0, W2Variant::Corrected),
            Kind::FlatoFronsdal => {
                Ok(z.powf(-0.5 * (d - 3.0)) * f(0.25 * (d - 3.0), 0.25 * (d - 1.0), 1.0)?)
            }
        }
    }

    pub fn closed_form(&self, z: f64) -> Result<f64> {
        self.eval_t(z, z)
    }
}

/// a^{d−2}Γ((d+1)/2)/(4(2π)^{(d−1)/2}): the E₀ → (d−3)/2 limit of the
/// Dirichlet prefactor, multiplying w₁.
pub fn singleton_constant(d: u32, a: f64) -> f64 {
    let d = d as f64;
    a.powf(d - 2.0) * gamma_fn(0.5 * (d + 1.0)).unwrap_or(f64::NAN)
        / (4.0 * (2.0 * PI).powf(0.5 * (d - 1.0)))
}

/// The digamma bracket of the logarithmic solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum W2Variant {
    /// ψ(A)+ψ(B)−ψ(A)−ψ(B)+ψ(2)−ψ(2+n)+ψ(1)−ψ(n+1).
    Printed,
    /// ψ(A+n)+ψ(B+n)−ψ(A)−ψ(B)+ψ(2)−ψ(2+n)+ψ(1)−ψ(n+1).
    Corrected,
}

pub fn w2_t<T: Real>(d: u32, z: T, z0: f64, variant: W2Variant) -> Result<T> {
    if d == 3 {
        return Err(Error::InvalidSpec("w2 is undefined at d = 3".into()));
    }
    if !(z0 > 1.0) {
        return Err(Error::Domain(format!("w2 needs Z > 1, got {z0}")));
    }
    let df = d as f64;
    let (a, b) = (0.25 * (df + 1.0), 0.25 * (df + 3.0));
    let x = (z * z).powi(-1);
    let x0 = 1.0 / (z0 * z0);
    let omx0 = (z0 - 1.0) * (z0 + 1.0) * x0;
    let cfg = SeriesConfig::default();
    let lead = z.powf(-0.5 * (df + 1.0));
    let f = hyp2f1_t(a, b, 2.0, x, x0, omx0, &cfg)?;
    let mut sum = T::cst(0.0);
    let mut xn = T::cst(1.0);
    let mut coef = 1.0;
    let mut bracket = 0.0;
    for n in 1..=cfg.max_terms {
        let m = (n - 1) as f64;
        let nf = n as f64;
        coef *= (a + m) * (b + m) / ((2.0 + m) * nf);
        bracket += -1.0 / (1.0 + nf) - 1.0 / nf;
        if variant == W2Variant::Corrected {
            bracket += 1.0 / (a + m) + 1.0 / (b + m);
        }
        xn = xn * x;
        let term = coef * bracket;
        sum = sum + xn * term;
        let size = (term * x0.powi(n as i32)).abs();
        if size <= 1e-17 * sum.value().abs().max(1e-300) && n > 4 {
            return Ok(-(lead * z.ln() * 2.0 * f) + lead * sum
                + z.powf(-0.5 * (df - 3.0)) * (16.0 / ((df - 1.0) * (df - 3.0))));
        }
    }
    Err(Error::NonConvergence {
        func: "w2".into(),
        terms: cfg.max_terms,
    })
}

fn ode_terms(d: u32, e0: f64, z: f64, v: Jet) -> (Jet, [f64; 3]) {
    let zj = Jet::var(z);
    let dv = v.d();
    let ddv = dv.d();
    let t2 = (zj * zj * -1.0 + 1.0) * ddv;
    let t1 = zj * dv * -(d as f64);
    let t0 = v * (e0 * (e0 - d as f64 + 1.0));
    (t2 + t1 + t0, [t2.0[0], t1.0[0], t0.0[0]])
}

fn scale_of(parts: [f64; 3]) -> f64 {
    parts.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Second-order residual of either reading of w2 at E₀ = (d−3)/2.
pub fn w2_residual(d: u32, z: f64, variant: W2Variant) -> Result<Residual> {
    let v = w2_t(d, Jet::var(z), z, variant)?;
    let (res, parts) = ode_terms(d, 0.5 * (d as f64 - 3.0), z, v);
    Ok(Residual { value: res.0[0], scale: scale_of(parts) })
}

/// (1−Z²)D″ − dZD′ + E₀(E₀−d+1)D. With `fd_step` the derivatives come from
/// central differences with one Richardson step; otherwise they are exact.
pub fn ode_residual(p: &PropagatorKind, z: f64, fd_step: Option<f64>) -> Result<Residual> {
    let (d, e0) = (p.d as f64, p.e0);
    match fd_step {
        None => {
            let v = p.eval_t(Jet::var(z), z)?;
            let (res, parts) = ode_terms(p.d, e0, z, v);
            Ok(Residual { value: res.0[0], scale: scale_of(parts) })
        }
        Some(h) => {
            if !(h > 0.0 && z - 2.0 * h > 1.0) {
                return Err(Error::Domain(format!("step {h} leaves Z > 1 at Z = {z}")));
            }
            let f = |x: f64| p.closed_form(x);
            let v0 = f(z)?;
            let diff = |h: f64| -> Result<(f64, f64)> {
                let (fp, fm) = (f(z + h)?, f(z - h)?);
                Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * v0 + fm) / (h * h)))
            };
            let (d1a, d2a) = diff(h)?;
            let (d1b, d2b) = diff(2.0 * h)?;
            let d1 = (4.0 * d1a - d1b) / 3.0;
            let d2 = (4.0 * d2a - d2b) / 3.0;
            let parts = [(1.0 - z * z) * d2, -d * z * d1, e0 * (e0 - d + 1.0) * v0];
            Ok(Residual { value: parts.iter().sum(), scale: scale_of(parts) })
        }
    }
}

/// The second-order operator applied twice, with exact derivatives.
pub fn ode_residual_squared(p: &PropagatorKind, z: f64) -> Result<Residual> {
    let v = p.eval_t(Jet::var(z), z)?;
    let (inner, _) = ode_terms(p.d, p.e0, z, v);
    let (outer, parts) = ode_terms(p.d, p.e0, z, inner);
    Ok(Residual { value: outer.0[0], scale: scale_of(parts).max(v.0[0].abs()) })
}

/// sec r cos t, the invariant between `x` and the origin.
pub fn z_origin(x: &Point) -> f64 {
    x.t.cos() / x.r.cos()
}

fn check_point(x: &Point) -> Result<f64> {
    if !(x.r >= 0.0 && x.r < 0.5 * PI) {
        return Err(Error::Domain(format!("r = {} outside [0, π/2)", x.r)));
    }
    let z = z_origin(x);
    if (z - 1.0).abs() < 1e-12 {
        return Err(Error::Divergent("coincident or light-like points (Z = 1)".into()));
    }
    if z < 1.0 {
        return Err(Error::Domain(format!(
            "mode sums are evaluated for Z > 1 only, got Z = {z}"
        )));
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSum {
    pub value: Complex64,
    /// |S(N) − S(0.8 N)| for regulator widths N.
    pub tail_estimate: f64,
    pub converged: bool,
}

impl ModeSum {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Smoothly regulated partial sums Σ exp(−(k/N)^p) a_k. The exponent grows
/// with the number of terms K and N is set so the last weight is e^{−30}; the
/// tail estimate compares with the width whose last weight is e^{−37}.
fn regulated(terms: &[Complex64]) -> ModeSum {
    let n = terms.len() as f64;
    let p = (n / 35.0).round().clamp(4.0, 16.0) as i32;
    let sum = |cut: f64| -> Complex64 {
        let w = n / cut.powf(1.0 / p as f64);
        terms
            .iter()
            .enumerate()
            .map(|(k, a)| a * (-(k as f64 / w).powi(p)).exp())
            .sum()
    };
    let s1 = sum(30.0);
    let s2 = sum(37.0);
    let tail = (s1 - s2).norm();
    ModeSum {
        value: s1,
        tail_estimate: tail,
        converged: tail <= 1e-7 * s1.norm().max(1e-300),
    }
}

/// Γ((d+1)/2)/((d−1)π^{(d−1)/2}) = Y₀(x)Y₀(0) for l = 0.
pub fn mode_sum_prefactor(d: u32) -> f64 {
    let d = d as f64;
    gamma_fn(0.5 * (d + 1.0)).unwrap_or(f64::NAN) / ((d - 1.0) * PI.powf(0.5 * (d - 1.0)))
}

/// Σ_k f_k(r) f_k(0) Y₀² e^{−iω_k t} over the l = 0 modes of `family`
/// (Dirichlet, Neumann, or Gauge for the E₀ = (d−3)/2 Dirichlet set).
pub fn mode_sum(
    d: u32,
    e0: f64,
    family: Family,
    x: &Point,
    nterms: usize,
    a: f64,
) -> Result<ModeSum> {
    if !matches!(family, Family::Dirichlet | Family::Neumann | Family::Gauge) {
        return Err(Error::InvalidSpec(format!("no mode sum for {family}")));
    }
    if nterms < 10 {
        return Err(Error::Domain("mode sums need at least 10 terms".into()));
    }
    check_point(x)?;
    let pre = mode_sum_prefactor(d);
    let terms: Vec<Complex64> = (0..nterms as u32)
        .map(|k| {
            let spec = ModeSpec::new(family, d, e0, 0, k, a)?;
            let f = radial_profile(&spec)?;
            let w = frequency(&spec)?;
            Ok(Complex64::from_polar(pre * f.eval(x.r) * f.eval(0.0), -w * x.t))
        })
        .collect::<Result<_>>()?;
    Ok(regulated(&terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbDecomposition {
    pub singleton_term: Complex64,
    pub gauge_series: Complex64,
    pub scalar_series: Complex64,
    pub total: Complex64,
    pub tail_estimate: f64,
}

/// The triplet split of D_FF: singleton, gauge (P^{(α,1)}) and scalar
/// (P^{(α+1,0)}) series with α = (d−3)/2.
pub fn gb_decomposition(d: u32, r: f64, t: f64, nterms: usize) -> Result<GbDecomposition> {
    if d < 4 {
        return Err(Error::InvalidSpec("the triplet split needs d >= 4".into()));
    }
    if nterms == 0 {
        return Err(Error::Domain("nterms must be positive".into()));
    }
    check_point(&Point::new(t, r, vec![]))?;
    let al = 0.5 * (d as f64 - 3.0);
    let (s, c) = (r.sin(), r.cos());
    let x = (2.0 * r).cos();
    let pre = 2f64.powf(al);
    let singleton = Complex64::from_polar(pre * c.powf(al), -al * t);
    let phase = |n: usize| Complex64::from_polar(1.0, -(0.5 * (d as f64 + 1.0) + 2.0 * n as f64) * t);
    let pg = jacobi_sequence(nterms as u32, al, 1.0, x);
    let ps = jacobi_sequence(nterms as u32, al + 1.0, 0.0, x);
    let mut gauge = Vec::with_capacity(nterms);
    let mut scalar = Vec::with_capacity(nterms);
    // (α)_{n+1}/n!
    let mut poch = al;
    for n in 0..nterms {
        let nf = n as f64;
        if n > 0 {
            poch *= (al + nf) / nf;
        }
        let base = poch / (nf + 1.0);
        let g = pre * c.powf(al + 2.0) * al * base / (nf + 1.0) * pg[n];
        let sc = -pre * c.powf(al) * s * s * base * ps[n];
        gauge.push(phase(n) * g);
        scalar.push(phase(n) * sc);
    }
    let (g, sc) = if nterms >= 10 {
        (regulated(&gauge), regulated(&scalar))
    } else {
        let plain = |v: &[Complex64]| ModeSum {
            value: v.iter().sum(),
            tail_estimate: f64::INFINITY,
            converged: false,
        };
        (plain(&gauge), plain(&scalar))
    };
    Ok(GbDecomposition {
        singleton_term: singleton,
        gauge_series: g.value,
        scalar_series: sc.value,
        total: singleton + g.value + sc.value,
        tail_estimate: g.tail_estimate + sc.tail_estimate,
    })
}

/// The single-series form 2^α cos^α r e^{−iαt} Σ (α)_n/n! e^{−2int} P_n^{(α−1,0)}.
pub fn ff_mode_sum(d: u32, r: f64, t: f64, nterms: usize) -> Result<ModeSum> {
    if d < 4 || nterms < 10 {
        return Err(Error::Domain("needs d >= 4 and at least 10 terms".into()));
    }
    check_point(&Point::new(t, r, vec![]))?;
    let al = 0.5 * (d as f64 - 3.0);
    let x = (2.0 * r).cos();
    let pre = 2f64.powf(al) * r.cos().powf(al);
    let pn = jacobi_sequence(nterms as u32, al - 1.0, 0.0, x);
    let mut coef = 1.0;
    let terms: Vec<Complex64> = (0..nterms)
        .map(|n| {
            if n > 0 {
                coef *= (al + n as f64 - 1.0) / n as f64;
            }
            Complex64::from_polar(
                pre * coef * pn[n],
                -(al + 2.0 * n as f64) * t,
            )
        })
        .collect();
    Ok(regulated(&terms))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub eps: f64,
    pub neumann: f64,
    pub dirichlet: f64,
    pub relative_gap: f64,
    /// Mode sum of the Dirichlet set at E₀ = (d−3)/2 + ε divided by w₁(Z).
    pub fitted_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub d: u32,
    pub z: f64,
    pub samples: Vec<LimitSample>,
    pub monotone: bool,
    /// max/min − 1 of SingletonLimit/shape over a z grid.
    pub shape_spread: f64,
    /// Linear extrapolations to ε = 0 of consecutive fitted constants.
    pub extrapolated_constants: Vec<f64>,
    /// Gauge-mode sum at E₀ = (d−3)/2 divided by w₁(Z).
    pub direct_constant: f64,
    pub printed_constant: f64,
    /// Largest relative spread among the extrapolated and direct constants.
    pub constant_spread: f64,
}

impl LimitReport {
    pub fn fitted_constant(&self) -> f64 {
        self.direct_constant
    }
}

/// The mode-sum point used for the constant fit at a given Z: t = 0, r = arcsec Z.
fn fit_point(z: f64) -> Point {
    Point::new(0.0, (1.0 / z).acos(), vec![])
}

pub fn neumann_dirichlet_limit_check(d: u32, z: f64, eps_sequence: &[f64], nterms: usize) -> Result<LimitReport> {
    if d < 3 {
        return Err(Error::InvalidSpec("the singleton limit needs d >= 3".into()));
    }
    if eps_sequence.is_empty() || eps_sequence.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Domain("epsilons must lie in (0, 1)".into()));
    }
    let a = 1.0;
    let base = 0.5 * (d as f64 - 3.0);
    let w1 = PropagatorKind::new(Kind::W1, d, base, a)?;
    let w1z = w1.closed_form(z)?;
    let pt = fit_point(z);
    let mut samples = Vec::new();
    for &eps in eps_sequence {
        let n = PropagatorKind::new(Kind::NeumannClosed, d, base + eps, a)?.closed_form(z)?;
        let dd = PropagatorKind::new(Kind::DirichletClosed, d, base + eps, a)?.closed_form(z)?;
        let ms = mode_sum(d, base + eps, Family::Dirichlet, &pt, nterms, a)?;
        samples.push(LimitSample {
            eps,
            neumann: n,
            dirichlet: dd,
            relative_gap: (n - dd).abs() / dd.abs(),
            fitted_constant: ms.re() / w1z,
        });
    }
    let monotone = samples.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap);
    let sl = PropagatorKind::new(Kind::SingletonLimit, d, base, a)?;
    let ratios: Vec<f64> = (0..16)
        .map(|i| {
            let zz = 1.1 * 1.3f64.powi(i);
            Ok(sl.closed_form(zz)? / w1.closed_form(zz)?)
        })
        .collect::<Result<_>>()?;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let extrapolated_constants: Vec<f64> = samples
        .windows(2)
        .map(|w| {
            let (e1, k1, e2, k2) = (w[0].eps, w[0].fitted_constant, w[1].eps, w[1].fitted_constant);
            (e1 * k2 - e2 * k1) / (e1 - e2)
        })
        .collect();
    let direct = mode_sum(d, base, Family::Gauge, &pt, nterms, a)?.re() / w1z;
    let mut all = extrapolated_constants.clone();
    all.push(direct);
    let (cl, ch) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(LimitReport {
        d,
        z,
        samples,
        monotone,
        shape_spread: hi / lo - 1.0,
        extrapolated_constants,
        direct_constant: direct,
        printed_constant: singleton_constant(d, a),
        constant_spread: (ch - cl) / direct.abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchFit {
    pub c1: f64,
    pub c2: f64,
    /// Largest relative residual of the fit on the grid.
    pub residual: f64,
}

/// Least-squares fit of a closed form onto the two 1/Z² branches.
pub fn fit_branches(p: &PropagatorKind, zs: &[f64]) -> Result<BranchFit> {
    if zs.len() < 2 {
        return Err(Error::Domain("need at least two sample points".into()));
    }
    let b1 = PropagatorKind { kind: Kind::GeneralZ { c1: 1.0, c2: 0.0 }, ..*p };
    let b2 = PropagatorKind { kind: Kind::GeneralZ { c1: 0.0, c2: 1.0 }, ..*p };
    let n = zs.len();
    let mut m = DMatrix::zeros(n, 2);
    let mut y = DVector::zeros(n);
    for (i, &z) in zs.iter().enumerate() {
        let v = p.closed_form(z)?;
        // Rows scaled to unit target so every point weighs the same.
        let w = 1.0 / v.abs().max(1e-300);
        m[(i, 0)] = b1.closed_form(z)? * w;
        m[(i, 1)] = b2.closed_form(z)? * w;
        y[i] = v * w;
    }
    let svd = m.clone().svd(true, true);
    let sol = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::Domain(format!("least squares failed: {e}")))?;
    let res = (&m * &sol - &y).amax();
    Ok(BranchFit { c1: sol[0], c2: sol[1], residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi_p;

    fn pk(kind: Kind, d: u32, e0: f64) -> PropagatorKind {
        PropagatorKind::new(kind, d, e0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let ff = pk(Kind::FlatoFronsdal, 4, 0.0);
        assert!((ff.closed_form(2.0).unwrap() - 0.745_749_187_316).abs() < 1e-11);
        assert!((pk(Kind::FlatoFronsdal, 5, 0.0).closed_form(2.0).unwrap() - 0.577_350_269_189_626).abs() < 1e-12);
        let w1 = pk(Kind::W1, 4, 0.0).closed_form(3.0).unwrap();
        let want = 3f64.powf(-2.5)
            * crate::specfun::hyp2f1(1.25, 1.75, 2.0, 1.0 / 9.0, &SeriesConfig::default()).unwrap();
        assert!((w1 - want).abs() < 1e-15);
        assert!(matches!(ff.closed_form(1.0), Err(Error::Domain(_))));
        assert!(matches!(ff.closed_form(0.5), Err(Error::Domain(_))));
        assert!(PropagatorKind::new(Kind::W2, 3, 0.0, 1.0).is_err());
        assert!(PropagatorKind::new(Kind::NeumannClosed, 4, 0.5, 1.0).is_err());
    }

    #[test]
    fn large_z_powers() {
        for &(kind, e0) in &[(Kind::DirichletClosed, 1.7), (Kind::NeumannClosed, 2.6)] {
            let p = pk(kind, 5, e0);
            let (z1, z2) = (1e3, 2e3);
            let slope = (p.closed_form(z2).unwrap() / p.closed_form(z1).unwrap()).ln() / 2f64.ln();
            let want = if kind == Kind::DirichletClosed { e0 - 4.0 } else { -e0 };
            assert!((slope - want).abs() < 1e-5, "{kind}: {slope}");
        }
    }

    #[test]
    fn odes_hold() {
        for &z in &[1.2, 1.7, 2.5, 5.0, 10.0] {
            for p in [
                pk(Kind::DirichletClosed, 4, 2.0),
                pk(Kind::NeumannClosed, 5, 3.0),
                pk(Kind::DirichletClosed, 7, 3.3),
                pk(Kind::SingletonLimit, 4, 0.0),
                pk(Kind::W1, 5, 0.0),
                pk(Kind::W2, 4, 0.0),
                pk(Kind::W2, 7, 0.0),
                pk(Kind::GeneralZ { c1: 0.3, c2: -1.2 }, 6, 2.2),
            ] {
                let r = ode_residual(&p, z, None).unwrap();
                assert!(r.relative() < 1e-12, "{} z={z}: {r:?}", p.kind);
            }
        }
        let r = ode_residual(&pk(Kind::DirichletClosed, 4, 2.0), 2.5, Some(1e-3)).unwrap();
        assert!(r.relative() < 1e-7, "{r:?}");
    }

    #[test]
    fn w2_bracket_adjudicated() {
        let z = 2.0;
        assert!(w2_residual(4, z, W2Variant::Printed).unwrap().relative() > 1e-4);
        assert!(w2_residual(4, z, W2Variant::Corrected).unwrap().relative() < 1e-12);
        let r = ode_residual(&pk(Kind::W2, 4, 0.0), z, Some(1e-3)).unwrap();
        assert!(r.relative() < 1e-6);
    }

    #[test]
    fn ff_needs_squared_operator() {
        for d in [4, 5, 7] {
            let ff = pk(Kind::FlatoFronsdal, d, 0.0);
            for &z in &[1.3, 2.0, 4.0] {
                assert!(ode_residual_squared(&ff, z).unwrap().relative() < 1e-10);
                assert!(ode_residual(&ff, z, None).unwrap().relative() > 1e-3);
            }
        }
    }

    #[test]
    fn mode_sums_match_closed_forms() {
        let x = Point::new(0.3, 0.5, vec![0.0, 0.0]);
        let z = z_origin(&x);
        let ms = mode_sum(4, 2.0, Family::Dirichlet, &x, 300, 1.0).unwrap();
        let cf = pk(Kind::DirichletClosed, 4, 2.0).closed_form(z).unwrap();
        assert!((ms.re() / cf - 1.0).abs() < 1e-6, "{ms:?} {cf}");
        assert!(ms.value.im.abs() < 1e-6 * cf.abs());
        let x5 = Point::new(0.3, 0.5, vec![0.0; 3]);
        let ms = mode_sum(5, 3.0, Family::Neumann, &x5, 300, 1.0).unwrap();
        let cf = pk(Kind::NeumannClosed, 5, 3.0).closed_form(z).unwrap();
        assert!((ms.re() / cf - 1.0).abs() < 1e-6, "{ms:?} {cf}");
        let o = Point::origin(4);
        assert!(matches!(mode_sum(4, 2.0, Family::Dirichlet, &o, 50, 1.0), Err(Error::Divergent(_))));
        let timelike = Point::new(0.5, 0.4, vec![0.0; 3]);
        assert!(mode_sum(5, 3.0, Family::Neumann, &timelike, 50, 1.0).is_err());
    }

    #[test]
    fn prefactor_is_inverse_sphere_volume() {
        for d in 3..8 {
            let y = crate::geometry::zonal_harmonic(d, 0, 0.3);
            assert!((mode_sum_prefactor(d) - y * y).abs() < 1e-14);
        }
    }

    #[test]
    fn triplet_split() {
        let g = gb_decomposition(4, 0.4, 0.2, 200).unwrap();
        let z = 0.2f64.cos() / 0.4f64.cos();
        let cf = pk(Kind::FlatoFronsdal, 4, 0.0).closed_form(z).unwrap();
        assert!((g.total.re - cf).abs() < 1e-8, "{g:?} {cf}");
        assert!((cf - 1.391_086_881_31).abs() < 1e-10);
        let one = ff_mode_sum(4, 0.4, 0.2, 200).unwrap();
        assert!((one.re() - cf).abs() < 1e-8);
        let first = gb_decomposition(5, 0.3, 0.1, 1).unwrap();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let phase = Complex64::from_polar(1.0, -3.0 * 0.1);
        assert!((first.gauge_series - phase * 2.0 * c.powi(3)).norm() < 1e-14);
        assert!((first.scalar_series + phase * 2.0 * c * s * s).norm() < 1e-14);
    }

    #[test]
    fn jacobi_lowering_identity() {
        for &(al, k, x) in &[(0.5, 0u32, 0.3), (1.7, 3, -0.6), (2.2, 7, 0.91), (0.1, 5, -0.99)] {
            let lhs = jacobi_p(k + 1, al - 1.0, 0.0, x);
            let rhs = al / (k as f64 + 1.0) * 0.5 * (1.0 + x) * jacobi_p(k, al, 1.0, x)
                - 0.5 * (1.0 - x) * jacobi_p(k, al + 1.0, 0.0, x);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_limit() {
        let rep = neumann_dirichlet_limit_check(4, 2.0, &[1e-2, 1e-3, 1e-4], 300).unwrap();
        // The gap is first order in ε: about 14.3 ε at d = 4, z = 2.
        let g: Vec<f64> = rep.samples.iter().map(|s| s.relative_gap).collect();
        assert!((g[1] / g[2] - 10.0).abs() < 0.1 && (g[0] / g[1] - 10.0).abs() < 0.5);
        assert!((g[2] - 1.434e-3).abs() < 1e-6, "{rep:?}");
        assert!(rep.monotone);
        assert!(rep.shape_spread < 1e-8);
        assert!(rep.constant_spread < 1e-4, "{rep:?}");
        assert!((rep.direct_constant / rep.printed_constant - 1.0).abs() < 1e-6, "{rep:?}");
    }

    #[test]
    fn branch_fit_recovers_constants() {
        let zs: Vec<f64> = (0..12).map(|i| 1.2 + 0.7 * i as f64).collect();
        let dd = pk(Kind::DirichletClosed, 5, 2.3);
        let f = fit_branches(&dd, &zs).unwrap();
        assert!(f.residual < 1e-8);
        assert!((f.c1 / dd.normalization().unwrap() - 1.0).abs() < 1e-8 && f.c2.abs() < 1e-8);
        let nn = pk(Kind::NeumannClosed, 5, 2.3);
        let f = fit_branches(&nn, &zs).unwrap();
        assert!((f.c2 / nn.normalization().unwrap() - 1.0).abs() < 1e-8 && f.c1.abs() < 1e-8);
    }
}
