//! Second-order scalar mode families on CAdS_d.

use crate::error::{Error, Result};
use crate::geometry::{zonal_harmonic, FieldEvaluator, Point};
use crate::jet::{Jet, Real};
use crate::quadrature::trig_pair;
use crate::specfun::{gamma_fn, gamma_ratio, gegenbauer_c_t, jacobi_p_t, rgamma, DEGENERATE_THRESHOLD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Dirichlet,
    Neumann,
    MasslessHigh,
    MasslessLow,
    Degenerate,
    Singleton,
    Gauge,
    #[serde(rename = "dd2")]
    DD2,
    #[serde(rename = "dn2")]
    DN2,
    #[serde(rename = "nd2")]
    ND2,
    #[serde(rename = "nn2")]
    NN2,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Dirichlet,
        Family::Neumann,
        Family::MasslessHigh,
        Family::MasslessLow,
        Family::Degenerate,
        Family::Singleton,
        Family::Gauge,
        Family::DD2,
        Family::DN2,
        Family::ND2,
        Family::NN2,
    ];

    pub fn is_two_dimensional(self) -> bool {
        matches!(self, Family::DD2 | Family::DN2 | Family::ND2 | Family::NN2)
    }

    /// E₀ fixed by the family, if any.
    pub fn forced_e0(self, d: u32) -> Option<f64> {
        let df = d as f64;
        match self {
            Family::MasslessHigh => Some(0.5 * df),
            Family::MasslessLow => Some(0.5 * df - 1.0),
            Family::Singleton | Family::Gauge => Some(0.5 * (df - 3.0)),
            _ => None,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let f = match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "dirichlet" => Family::Dirichlet,
            "neumann" => Family::Neumann,
            "masslesshigh" => Family::MasslessHigh,
            "masslesslow" => Family::MasslessLow,
            "degenerate" => Family::Degenerate,
            "singleton" => Family::Singleton,
            "gauge" => Family::Gauge,
            "dd2" => Family::DD2,
            "dn2" => Family::DN2,
            "nd2" => Family::ND2,
            "nn2" => Family::NN2,
            _ => return Err(Error::InvalidSpec(format!("unknown mode family '{s}'"))),
        };
        Ok(f)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub family: Family,
    pub d: u32,
    pub e0: f64,
    pub l: u32,
    pub k: u32,
    pub a: f64,
}

impl ModeSpec {
    pub fn new(family: Family, d: u32, e0: f64, l: u32, k: u32, a: f64) -> Result<Self> {
        let s = ModeSpec { family, d, e0, l, k, a };
        s.validate()?;
        Ok(s)
    }

    /// Builds a spec for a family with fixed E₀.
    pub fn fixed(family: Family, d: u32, l: u32, k: u32, a: f64) -> Result<Self> {
        let e0 = family.forced_e0(d).ok_or_else(|| {
            Error::InvalidSpec(format!("family {family} does not fix E0"))
        })?;
        Self::new(family, d, e0, l, k, a)
    }

    pub fn degenerate(d: u32, m: i32, l: u32, k: u32, a: f64) -> Result<Self> {
        Self::new(Family::Degenerate, d, 0.5 * (d as f64 - 1.0) + m as f64, l, k, a)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if !self.e0.is_finite() {
            return bad("E0 must be finite".into());
        }
        let d = self.d as f64;
        let e0 = self.e0;
        let fam = self.family;
        if fam.is_two_dimensional() {
            if self.d != 2 {
                return bad(format!("{fam} requires d = 2"));
            }
            if self.l != 0 {
                return bad(format!("{fam} has no angular label; l must be 0"));
            }
            let ok = match fam {
                Family::DD2 => e0 < 1.5,
                Family::DN2 => e0 > -0.5,
                Family::ND2 => e0 < 1.0,
                _ => e0 > 0.0,
            };
            if !ok {
                return bad(format!("{fam} is not normalizable at E0 = {e0}"));
            }
            return Ok(());
        }
        if self.d < 3 {
            return bad(format!("{fam} requires d >= 3; use the d = 2 families"));
        }
        if let Some(f) = fam.forced_e0(self.d) {
            if (e0 - f).abs() > 1e-12 {
                return bad(format!("{fam} forces E0 = {f}, got {e0}"));
            }
        }
        match fam {
            Family::Dirichlet if e0 >= 0.5 * (d + 1.0) => bad(format!(
                "Dirichlet modes need E0 < (d+1)/2; E0 = {e0} is the Neumann set at {}",
                d - 1.0 - e0
            )),
            Family::Neumann if e0 <= 0.5 * (d - 3.0) => bad(format!(
                "Neumann modes need E0 > (d-3)/2; E0 = {e0} is the Dirichlet set at {}",
                d - 1.0 - e0
            )),
            Family::Degenerate => {
                let m = e0 - 0.5 * (d - 1.0);
                if (m - m.round()).abs() > DEGENERATE_THRESHOLD {
                    bad(format!("degenerate family needs E0 - (d-1)/2 integer, got {m}"))
                } else {
                    Ok(())
                }
            }
            Family::Singleton if self.k != 0 => bad("singleton modes have k = 0".into()),
            _ => Ok(()),
        }
    }

    pub fn lambda(&self) -> f64 {
        mass_from_e0(self.e0, self.d, self.a).m0sq
    }

    fn degenerate_m(&self) -> i32 {
        (self.e0 - 0.5 * (self.d as f64 - 1.0)).round() as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassData {
    pub m0sq: f64,
    pub lambda_c: f64,
    pub bf_bound: f64,
}

pub fn mass_from_e0(e0: f64, d: u32, a: f64) -> MassData {
    let df = d as f64;
    let a2 = a * a;
    MassData {
        m0sq: a2 * e0 * (e0 - df + 1.0),
        lambda_c: a2 * (e0 - 0.5 * df) * (e0 - 0.5 * df + 1.0),
        bf_bound: -(df - 1.0) * (df - 1.0) * a2 / 4.0,
    }
}

pub fn e0_from_mass(m0sq: f64, d: u32, a: f64) -> Result<(f64, f64)> {
    let h = 0.5 * (d as f64 - 1.0);
    let disc = h * h + m0sq / (a * a);
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "m0^2/a^2 = {} is below the bound -(d-1)^2/4",
            m0sq / (a * a)
        )));
    }
    let s = disc.sqrt();
    Ok((h + s, h - s))
}

pub fn frequency(spec: &ModeSpec) -> Result<f64> {
    spec.validate()?;
    let d = spec.d as f64;
    let (e0, l, k) = (spec.e0, spec.l as f64, spec.k as f64);
    Ok(match spec.family {
        Family::Dirichlet => d - 1.0 - e0 + l + 2.0 * k,
        Family::Neumann => e0 + l + 2.0 * k,
        Family::MasslessHigh => 0.5 * d + l + 2.0 * k,
        Family::MasslessLow => 0.5 * d - 1.0 + l + 2.0 * k,
        Family::Degenerate => {
            0.5 * (d - 1.0) + spec.degenerate_m().unsigned_abs() as f64 + l + 2.0 * k
        }
        Family::Singleton => 0.5 * (d - 3.0) + l,
        Family::Gauge => 0.5 * (d + 1.0) + l + 2.0 * k,
        Family::DD2 => 2.0 - e0 + 2.0 * k,
        Family::DN2 => e0 + 1.0 + 2.0 * k,
        Family::ND2 => 1.0 - e0 + 2.0 * k,
        Family::NN2 => e0 + 2.0 * k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// P_k^{(α,β)}(cos 2r).
    Jacobi { k: u32, alpha: f64, beta: f64 },
    /// C_n^{λ}(cos r).
    Gegenbauer { n: u32, lambda: f64 },
    Zero,
}

/// coefficient · sin^p r · cos^q r · shape(r).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub coefficient: f64,
    pub sin_power: f64,
    pub cos_power: f64,
    pub shape: Shape,
    pub exponent_at_origin: f64,
    pub exponent_at_boundary: f64,
}

impl RadialProfile {
    pub fn zero() -> Self {
        RadialProfile {
            coefficient: 0.0,
            sin_power: 0.0,
            cos_power: 0.0,
            shape: Shape::Zero,
            exponent_at_origin: 0.0,
            exponent_at_boundary: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape::Zero) || self.coefficient == 0.0
    }

    /// Evaluates from (sin r, cos r).
    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> T {
        let poly = match self.shape {
            Shape::Zero => return T::cst(0.0),
            Shape::Jacobi { k, alpha, beta } => jacobi_p_t(k, alpha, beta, c * c - s * s),
            Shape::Gegenbauer { n, lambda } => gegenbauer_c_t(n, lambda, c),
        };
        s.powf(self.sin_power) * c.powf(self.cos_power) * poly * self.coefficient
    }

    pub fn eval(&self, r: f64) -> f64 {
        let (s, c) = trig_pair(r);
        self.eval_sc(s, c)
    }

    pub fn jet(&self, r: f64) -> Jet {
        let (s, c) = trig_pair(r);
        let (sj, cj) = Jet::trig_pair(s, c);
        self.eval_sc(sj, cj)
    }

    /// Profile divided by its coefficient.
    pub fn unnormalized(&self) -> RadialProfile {
        RadialProfile {
            coefficient: 1.0,
            ..*self
        }
    }
}

fn jacobi_profile(coefficient: f64, p: f64, q: f64, k: u32, alpha: f64, beta: f64) -> RadialProfile {
    RadialProfile {
        coefficient,
        sin_power: p,
        cos_power: q,
        shape: Shape::Jacobi { k, alpha, beta },
        exponent_at_origin: p,
        exponent_at_boundary: if beta == -1.0 && k > 0 { q + 2.0 } else { q },
    }
}

fn sqrt_checked(c2: f64, what: &str) -> Result<f64> {
    if c2.is_finite() && c2 >= 0.0 {
        Ok(c2.sqrt())
    } else {
        Err(Error::NormalizationPole(format!("{what}: C^2 = {c2}")))
    }
}

fn norm_ratio(num: &[f64], den: &[f64], what: &str) -> Result<f64> {
    for &x in num.iter().chain(den) {
        if x <= 0.0 && x == x.round() {
            return Err(Error::NormalizationPole(format!("{what}: Gamma argument {x}")));
        }
    }
    let v = gamma_ratio(num, den)?;
    sqrt_checked(v, what)
}

fn dirichlet_profile(d: f64, e0: f64, l: u32, k: u32, a: f64) -> Result<RadialProfile> {
    let (lf, kf) = (l as f64, k as f64);
    let c = a.powf(0.5 * (d - 2.0))
        * norm_ratio(
            &[d - 1.0 - e0 + lf + kf, kf + 1.0],
            &[0.5 * (d - 1.0) + lf + kf, 0.5 * (d + 1.0) - e0 + kf],
            "Dirichlet normalization",
        )?;
    Ok(jacobi_profile(c, lf, d - 1.0 - e0, k, lf + 0.5 * (d - 3.0), 0.5 * (d - 1.0) - e0))
}

fn neumann_profile(d: f64, e0: f64, l: u32, k: u32, a: f64) -> Result<RadialProfile> {
    let (lf, kf) = (l as f64, k as f64);
    let c = a.powf(0.5 * (d - 2.0))
        * norm_ratio(
            &[e0 + lf + kf, kf + 1.0],
            &[0.5 * (d - 1.0) + lf + kf, e0 - 0.5 * (d - 3.0) + kf],
            "Neumann normalization",
        )?;
    Ok(jacobi_profile(c, lf, e0, k, lf + 0.5 * (d - 3.0), e0 - 0.5 * (d - 1.0)))
}

/// Gauge modes: the Neumann set at E₀ = (d+1)/2.
fn gauge_profile(d: f64, l: u32, k: u32, a: f64) -> RadialProfile {
    let (lf, kf) = (l as f64, k as f64);
    let c = a.powf(0.5 * (d - 2.0)) * ((0.5 * (d - 1.0) + lf + kf) / (kf + 1.0)).sqrt();
    jacobi_profile(c, lf, 0.5 * (d + 1.0), k, lf + 0.5 * (d - 3.0), 1.0)
}

fn singleton_profile(d: f64, l: u32) -> RadialProfile {
    jacobi_profile(1.0, l as f64, 0.5 * (d - 3.0), 0, 0.0, 0.0)
}

fn massless_profile(d: f64, l: u32, k: u32, a: f64, high: bool) -> Result<RadialProfile> {
    let lg = l as f64 + 0.5 * d - 1.0;
    if lg <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "massless modes need l + d/2 - 1 > 0, got {lg}"
        )));
    }
    let kf = k as f64;
    // (λ)_{k+1} and (λ)_{k+1/2} for the odd branch, (λ)_k and (λ)_{k+1/2} for the even one.
    let (top, shift) = if high { (kf + 1.5, 1.0) } else { (kf + 0.5, 0.0) };
    let c2 = a.powf(d - 2.0) / PI
        * gamma_ratio(
            &[top, kf + 1.0, lg, lg],
            &[lg + kf + shift, lg + kf + 0.5],
        )?;
    let n = if high { 2 * k + 1 } else { 2 * k };
    Ok(RadialProfile {
        coefficient: sqrt_checked(c2, "massless normalization")?,
        sin_power: l as f64,
        cos_power: 0.5 * d - 1.0,
        shape: Shape::Gegenbauer { n, lambda: lg },
        exponent_at_origin: l as f64,
        exponent_at_boundary: if high { 0.5 * d } else { 0.5 * d - 1.0 },
    })
}

fn two_dim_profile(fam: Family, e0: f64, k: u32, a: f64) -> Result<RadialProfile> {
    let kf = k as f64;
    let (num, den, p, q, alpha, beta) = match fam {
        Family::DD2 => (
            [kf - e0 + 2.0, kf + 1.0],
            [kf + 1.5, kf - e0 + 1.5],
            1.0,
            1.0 - e0,
            0.5,
            0.5 - e0,
        ),
        Family::DN2 => (
            [kf + e0 + 1.0, kf + 1.0],
            [kf + 1.5, kf + e0 + 0.5],
            1.0,
            e0,
            0.5,
            e0 - 0.5,
        ),
        Family::ND2 => (
            [kf - e0 + 1.0, kf + 1.0],
            [kf + 0.5, kf - e0 + 1.5],
            0.0,
            1.0 - e0,
            -0.5,
            0.5 - e0,
        ),
        _ => (
            [kf + e0, kf + 1.0],
            [kf + 0.5, kf + e0 + 0.5],
            0.0,
            e0,
            -0.5,
            e0 - 0.5,
        ),
    };
    let _ = a;
    let c = norm_ratio(&num, &den, "two-dimensional normalization")?;
    Ok(jacobi_profile(c, p, q, k, alpha, beta))
}

pub fn radial_profile(spec: &ModeSpec) -> Result<RadialProfile> {
    spec.validate()?;
    let d = spec.d as f64;
    let (e0, l, k, a) = (spec.e0, spec.l, spec.k, spec.a);
    match spec.family {
        Family::Dirichlet => dirichlet_profile(d, e0, l, k, a),
        Family::Neumann => neumann_profile(d, e0, l, k, a),
        Family::MasslessHigh => massless_profile(d, l, k, a, true),
        Family::MasslessLow => massless_profile(d, l, k, a, false),
        Family::Degenerate => Ok(degenerate_profile(spec.d, spec.degenerate_m(), l, k, a)?.profile),
        Family::Singleton => Ok(singleton_profile(d, l)),
        Family::Gauge => Ok(gauge_profile(d, l, k, a)),
        f => two_dim_profile(f, e0, k, a),
    }
}

/// Coefficients (C₁, C₂) of the cos^{E₀} and cos^{d−1−E₀} branches of the
/// regular solution near r = π/2.
pub fn boundary_coeffs(d: u32, e0: f64, l: u32, omega: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    let lf = l as f64;
    let h = 0.5 * (df - 1.0);
    let m = e0 - h;
    if (m - m.round()).abs() < DEGENERATE_THRESHOLD {
        return Err(Error::Degenerate(format!(
            "E0 - (d-1)/2 = {m} is an integer; use degenerate_profile"
        )));
    }
    let g = gamma_fn(lf + h)?;
    let c1 = g
        * gamma_fn(h - e0)?
        * rgamma(0.5 * (lf + df - 1.0 - e0 - omega))
        * rgamma(0.5 * (lf + df - 1.0 - e0 + omega));
    let c2 = g
        * gamma_fn(e0 - h)?
        * rgamma(0.5 * (lf + e0 + omega))
        * rgamma(0.5 * (lf + e0 - omega));
    Ok((c1, c2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerateMode {
    pub profile: RadialProfile,
    pub omega: f64,
    /// Coefficient of the logarithmic term of the regular solution at this ω.
    pub log_coefficient: f64,
}

/// Coefficient of the log(cos² r) series in the regular solution when
/// E₀ − (d−1)/2 is an integer.
pub fn log_coefficient(d: u32, e0: f64, l: u32, omega: f64) -> Result<f64> {
    let df = d as f64;
    let lf = l as f64;
    let a = 0.5 * (lf + e0 + omega);
    let b = 0.5 * (lf + e0 - omega);
    let c = lf + 0.5 * (df - 1.0);
    let n = c - a - b;
    if (n - n.round()).abs() > DEGENERATE_THRESHOLD {
        return Err(Error::Domain(format!("c - a - b = {n} is not an integer")));
    }
    let n = n.round() as i64;
    let fact = gamma_fn(n.unsigned_abs() as f64 + 1.0)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let pair = if n >= 0 {
        rgamma(a) * rgamma(b)
    } else {
        rgamma(c - a) * rgamma(c - b)
    };
    Ok(sign * gamma_fn(c)? * pair / fact)
}

pub fn degenerate_profile(d: u32, m: i32, l: u32, k: u32, a: f64) -> Result<DegenerateMode> {
    if d < 3 {
        return Err(Error::InvalidSpec("degenerate family requires d >= 3".into()));
    }
    let df = d as f64;
    let e0 = 0.5 * (df - 1.0) + m as f64;
    let (profile, omega) = if m >= 0 {
        (neumann_profile(df, e0, l, k, a)?, e0 + l as f64 + 2.0 * k as f64)
    } else {
        (dirichlet_profile(df, e0, l, k, a)?, df - 1.0 - e0 + l as f64 + 2.0 * k as f64)
    };
    Ok(DegenerateMode {
        profile,
        omega,
        log_coefficient: log_coefficient(d, e0, l, omega)?,
    })
}

/// Limit E₀ → (d−3)/2 of the Neumann mode (d, l, k).
pub fn neumann_singleton_limit(d: u32, l: u32, k: u32, a: f64) -> Result<RadialProfile> {
    if d < 3 {
        return Err(Error::InvalidSpec("the singleton limit requires d >= 3".into()));
    }
    let df = d as f64;
    let alpha = l as f64 + 0.5 * (df - 3.0);
    if k == 0 {
        if alpha == 0.0 {
            let mut p = singleton_profile(df, 0);
            p.coefficient = a.powf(0.5 * (df - 2.0));
            return Ok(p);
        }
        return Ok(RadialProfile::zero());
    }
    let kf = k as f64;
    let c = (a.powf(df - 2.0) * kf / (alpha + kf)).sqrt();
    Ok(jacobi_profile(c, l as f64, 0.5 * (df - 3.0), k, alpha, -1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    /// Largest magnitude among the individual terms of the operator.
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// Q f at r for f given through its (sin r, cos r) jets.
pub fn apply_q(
    d: u32,
    l: u32,
    lambda_over_a2: f64,
    omega: f64,
    r: f64,
    f: impl Fn(Jet, Jet) -> Jet,
) -> Residual {
    let (s, c) = trig_pair(r);
    let (sj, cj) = Jet::trig_pair(s, c);
    let fj = f(sj, cj);
    let (f0, f1, f2) = (fj.deriv(0), fj.deriv(1), fj.deriv(2));
    let df = d as f64;
    let lf = l as f64;
    let terms = [
        f2,
        (df - 2.0) / (s * c) * f1,
        -lf * (lf + df - 3.0) / (s * s) * f0,
        -lambda_over_a2 / (c * c) * f0,
        omega * omega * f0,
    ];
    Residual {
        value: terms.iter().sum(),
        scale: terms.iter().fold(0.0f64, |m, t| m.max(t.abs())),
    }
}

pub fn residual_q(spec: &ModeSpec, r: f64) -> Result<Residual> {
    if !(r > 0.0 && r < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("r = {r} outside (0, π/2)")));
    }
    let prof = radial_profile(spec)?;
    let omega = frequency(spec)?;
    let lam = spec.e0 * (spec.e0 - spec.d as f64 + 1.0);
    Ok(apply_q(spec.d, spec.l, lam, omega, r, |s, c| prof.eval_sc(s, c)))
}

/// e^{−iωt} f(r) Y_l(θ₁) as a field on CAdS_d.
pub struct ModeField {
    pub spec: ModeSpec,
    pub profile: RadialProfile,
    pub omega: f64,
}

impl ModeField {
    pub fn new(spec: &ModeSpec) -> Result<Self> {
        Ok(ModeField {
            spec: *spec,
            profile: radial_profile(spec)?,
            omega: frequency(spec)?,
        })
    }
}

impl FieldEvaluator for ModeField {
    fn eval(&self, p: &Point) -> Complex64 {
        let y = zonal_harmonic(self.spec.d, self.spec.l, p.angles.first().copied().unwrap_or(0.0));
        Complex64::from_polar(self.profile.eval(p.r) * y, -self.omega * p.t)
    }
    fn angular_degree(&self) -> Option<u32> {
        Some(self.spec.l)
    }
}
