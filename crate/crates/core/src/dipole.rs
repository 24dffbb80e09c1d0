//! The fourth-order equation (□ − λ)²F = 0: quartic radial operator, the
//! second fundamental solution ψ₂, the scalar and Ψ⁽⁰⁾ modes, and the
//! Gupta–Bleuler triplet space.

use crate::error::{Error, Result};
use crate::geometry::{ladder_apply_d4, FieldEvaluator, FnField, LadderDirection, Point, DEFAULT_STEP};
use crate::jet::{Jet, Real};
use crate::modes::{radial_profile, Family, ModeSpec, RadialProfile, Residual, Shape};
use crate::quadrature::trig_pair;
use crate::specfun::{hyp2f1_t, rgamma, SeriesConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoeffs {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

/// Coefficients of Q²f = a₄f⁗ + a₃f‴ + a₂f″ + a₁f′ + a₀f, with
/// `lambda` the eigenvalue λ (so λ/a² enters) and Λ = −l(l+d−3).
pub fn quartic_coeffs(d: u32, lambda: f64, a: f64, omega: f64, l: u32, r: f64) -> QuarticCoeffs {
    let (s, c) = trig_pair(r);
    let dm = d as f64 - 2.0;
    let lf = l as f64;
    let big = -lf * (lf + d as f64 - 3.0);
    let lam = lambda / (a * a);
    let w2 = omega * omega;
    let cot = c / s;
    let csc2 = 1.0 / (s * s);
    let (c2, c3, c4) = (c * c, c * c * c, c * c * c * c);
    let cot2 = cot * cot;
    let cot3 = cot2 * cot;
    QuarticCoeffs {
        a4: c4,
        a3: 2.0 * dm * c2 * cot - 4.0 * c3 * s,
        a2: -2.0 * dm * c2 - 2.0 * lam * c2 - 2.0 * c4 + 2.0 * w2 * c4 - 2.0 * dm * cot2
            + dm * dm * cot2
            + 2.0 * big * c2 * cot2
            + 2.0 * c2 * s * s,
        a1: -2.0 * dm * lam * cot + 2.0 * dm * w2 * c2 * cot + 2.0 * dm * cot3 - 4.0 * big * cot3
            + 2.0 * dm * big * cot3
            - dm * dm * cot * csc2
            - 4.0 * w2 * c3 * s,
        a0: 2.0 * big * cot2 * csc2 - 2.0 * dm * w2 * c2 - 2.0 * lam * w2 * c2 - 2.0 * w2 * c4
            - 2.0 * big * lam * cot2
            + 2.0 * big * w2 * c2 * cot2
            + w4(w2) * c4
            + 4.0 * big * cot2 * cot2
            + big * big * cot2 * cot2
            - 2.0 * dm * big * cot2 * csc2
            + 2.0 * w2 * c2 * s * s
            + lam * lam,
    }
}

fn w4(w2: f64) -> f64 {
    w2 * w2
}

impl QuarticCoeffs {
    pub fn apply(&self, f: &Jet) -> Residual {
        let terms = [
            self.a4 * f.deriv(4),
            self.a3 * f.deriv(3),
            self.a2 * f.deriv(2),
            self.a1 * f.deriv(1),
            self.a0 * f.deriv(0),
        ];
        Residual {
            value: terms.iter().sum(),
            scale: terms.iter().fold(0.0f64, |m, t| m.max(t.abs())),
        }
    }
}

/// Q applied to a jet; the result is exact through second order.
fn q_jet(d: u32, l: u32, lam: f64, omega: f64, s: Jet, c: Jet, f: Jet) -> Jet {
    let df = d as f64;
    let lf = l as f64;
    let f1 = f.d();
    let f2 = f1.d();
    f2 + f1 * (df - 2.0) / (s * c) - f * (Jet::cst(lf * (lf + df - 3.0)) / (s * s))
        - f * (Jet::cst(lam) / (c * c))
        + f * (omega * omega)
}

/// cos²r Q(cos²r Qf) at r, by composing the second-order operator on jets.
/// This is the radial part of (□ − λ)² up to a⁴.
pub fn q_squared(
    d: u32,
    l: u32,
    lambda_over_a2: f64,
    omega: f64,
    r: f64,
    f: impl Fn(Jet, Jet) -> Jet,
) -> f64 {
    let (s, c) = trig_pair(r);
    let (sj, cj) = Jet::trig_pair(s, c);
    let q1 = cj * cj * q_jet(d, l, lambda_over_a2, omega, sj, cj, f(sj, cj));
    c * c * q_jet(d, l, lambda_over_a2, omega, sj, cj, q1).deriv(0)
}

/// ψ₂ = sin^{l+2} r cos^{E₀} r Σ cₙ sin^{2n} r, normalized by c₀ = 1 and
/// cos²r Qψ₂ = c ψ₁ with ψ₁ = sin^l r cos^{E₀} r ₂F₁(a, b; l+(d−1)/2; sin² r).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psi2Series {
    pub d: u32,
    pub e0: f64,
    pub l: u32,
    pub omega: f64,
    pub coefficients: Vec<f64>,
    /// The constant c in cos²r Qψ₂ = cψ₁.
    pub source_constant: f64,
}

pub fn psi2_series(d: u32, e0: f64, l: u32, omega: f64, nmax: usize) -> Result<Psi2Series> {
    if nmax < 2 {
        return Err(Error::Domain(format!("psi2 series needs nmax >= 2, got {nmax}")));
    }
    let df = d as f64;
    let lf = l as f64;
    let a = 0.5 * (lf + e0 + omega);
    let b = 0.5 * (lf + e0 - omega);
    let gamma = lf + 0.5 * (df - 1.0);
    let c = 2.0 * (2.0 * lf + df - 1.0);
    let mut coeffs = Vec::with_capacity(nmax + 1);
    let mut term = 1.0;
    let mut partial = 1.0;
    let mut prev = 0.0;
    for n in 0..=nmax {
        let nf = n as f64;
        if n > 0 {
            let k = nf - 1.0;
            term *= (a + k) * (b + k) / ((gamma + k) * nf);
            partial += term;
        }
        let shift = (e0 + lf + 2.0 * nf).powi(2) - omega * omega;
        let cn = (c * partial + prev * shift) / ((nf + 1.0) * (4.0 * nf + 2.0 * df - 2.0 + 4.0 * lf));
        coeffs.push(cn);
        prev = cn;
    }
    Ok(Psi2Series {
        d,
        e0,
        l,
        omega,
        coefficients: coeffs,
        source_constant: c,
    })
}

impl Psi2Series {
    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> Result<T> {
        let x = s * s;
        let xv = x.value();
        let mut sum = T::cst(0.0);
        let mut pw = T::cst(1.0);
        let mut last = 0.0;
        for &cn in &self.coefficients {
            sum = sum + pw * cn;
            last = (cn * pw.value()).abs();
            pw = pw * x;
        }
        let tail = last * xv / (1.0 - xv).max(1e-300);
        if tail > 1e-13 * sum.value().abs().max(1e-300) {
            return Err(Error::NonConvergence {
                func: "psi2_series",
                terms: self.coefficients.len(),
            });
        }
        Ok(s.powf(self.l as f64 + 2.0) * c.powf(self.e0) * sum)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let (s, c) = trig_pair(r);
        self.eval_sc(s, c)
    }

    /// ψ₁ of the same parameters, unnormalized.
    pub fn psi1_sc<T: Real>(&self, s: T, c: T) -> Result<T> {
        let lf = self.l as f64;
        let a = 0.5 * (lf + self.e0 + self.omega);
        let b = 0.5 * (lf + self.e0 - self.omega);
        let g = lf + 0.5 * (self.d as f64 - 1.0);
        let (sv, cv) = (s.value(), c.value());
        let f = hyp2f1_t(a, b, g, s * s, sv * sv, cv * cv, &SeriesConfig::default())?;
        Ok(s.powf(lf) * c.powf(self.e0) * f)
    }
}

/// ψ₂ at E₀ = (d−3)/2 in hypergeometric form, optionally divided by
/// Γ(ω − (d−3)/2 − l).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psi2Singleton {
    pub d: u32,
    pub l: u32,
    pub omega: f64,
    pub constrained: bool,
}

pub fn psi2_singleton(d: u32, l: u32, omega: f64, constrained: bool) -> Result<Psi2Singleton> {
    if d < 3 {
        return Err(Error::Domain("psi2_singleton requires d >= 3".into()));
    }
    Ok(Psi2Singleton { d, l, omega, constrained })
}

impl Psi2Singleton {
    pub fn prefactor(&self) -> f64 {
        if self.constrained {
            rgamma(self.omega - 0.5 * (self.d as f64 - 3.0) - self.l as f64)
        } else {
            1.0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor() == 0.0
    }

    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> Result<T> {
        let pre = self.prefactor();
        if pre == 0.0 {
            return Ok(T::cst(0.0));
        }
        let df = self.d as f64;
        let lf = self.l as f64;
        let base = 0.5 * lf + 0.25 * (df + 1.0);
        let (sv, cv) = (s.value(), c.value());
        let f = hyp2f1_t(
            base + 0.5 * self.omega,
            base - 0.5 * self.omega,
            lf + 0.5 * (df + 1.0),
            s * s,
            sv * sv,
            cv * cv,
            &SeriesConfig::default(),
        )?;
        Ok(s.powf(lf + 2.0) * c.powf(0.5 * (df - 3.0)) * f * pre)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let (s, c) = trig_pair(r);
        self.eval_sc(s, c)
    }
}

/// sin^{l+2} r cos^{(d−3)/2} r P_k^{(l+(d−1)/2, 0)}(cos 2r), time factor
/// (d+1)/2 + l + 2k.
pub fn scalar_mode(d: u32, l: u32, k: u32) -> Result<(RadialProfile, f64)> {
    if d < 3 {
        return Err(Error::Domain("scalar modes require d >= 3".into()));
    }
    let df = d as f64;
    let lf = l as f64;
    let prof = RadialProfile {
        coefficient: 1.0,
        sin_power: lf + 2.0,
        cos_power: 0.5 * (df - 3.0),
        shape: Shape::Jacobi {
            k,
            alpha: lf + 0.5 * (df - 1.0),
            beta: 0.0,
        },
        exponent_at_origin: lf + 2.0,
        exponent_at_boundary: 0.5 * (df - 3.0),
    };
    Ok((prof, 0.5 * (df + 1.0) + lf + 2.0 * k as f64))
}

/// Ψ⁽⁰⁾_l = sin^{l+2} r cos^{(d−3)/2} r · A Φ(sin² r, 1, A), A = l + (d−1)/2,
/// so that the bracket starts at 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psi0Mode {
    pub d: u32,
    pub l: u32,
}

pub fn psi0_mode(d: u32, l: u32) -> Result<Psi0Mode> {
    if d < 3 {
        return Err(Error::Domain("psi0 modes require d >= 3".into()));
    }
    Ok(Psi0Mode { d, l })
}

impl Psi0Mode {
    pub fn lerch_a(&self) -> f64 {
        self.l as f64 + 0.5 * (self.d as f64 - 1.0)
    }

    pub fn frequency(&self) -> f64 {
        0.5 * (self.d as f64 - 3.0) + self.l as f64
    }

    /// A Φ(x, 1, A) by direct summation.
    fn bracket_series<T: Real>(&self, x: T) -> T {
        let a = self.lerch_a();
        let xv = x.value();
        let mut sum = T::cst(0.0);
        let mut pw = T::cst(1.0);
        for n in 0..2000 {
            let t = a / (n as f64 + a);
            sum = sum + pw * t;
            if pw.value() * t < 1e-18 * sum.value() {
                break;
            }
            pw = pw * x;
            if xv == 0.0 {
                break;
            }
        }
        sum
    }

    /// A Φ(x, 1, A) from the logarithmic (odd d) or arctanh (even d) form.
    fn bracket_closed<T: Real>(&self, s: T, c: T) -> T {
        let x = s * s;
        if self.d % 2 == 1 {
            let n = self.l + (self.d - 1) / 2;
            let mut acc = (c * c).ln();
            let mut pw = T::cst(1.0);
            for k in 1..n {
                pw = pw * x;
                acc = acc + pw / k as f64;
            }
            -acc * x.powi(-(n as i32)) * n as f64
        } else {
            let n = self.l + self.d / 2;
            let atanh = ((s + 1.0) / c).ln();
            let mut acc = atanh;
            let mut pw = s;
            for k in 1..n {
                acc = acc - pw / (2 * k - 1) as f64;
                pw = pw * x;
            }
            acc * s.powi(1 - 2 * n as i32) * (2 * n - 1) as f64
        }
    }

    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> T {
        let x = s * s;
        let bracket = if x.value() < 0.5 {
            self.bracket_series(x)
        } else {
            self.bracket_closed(s, c)
        };
        s.powf(self.l as f64 + 2.0) * c.powf(0.5 * (self.d as f64 - 3.0)) * bracket
    }

    pub fn eval(&self, r: f64) -> f64 {
        let (s, c) = trig_pair(r);
        self.eval_sc(s, c)
    }

    /// The closed form evaluated at any r, for cross-checks.
    pub fn eval_closed(&self, r: f64) -> f64 {
        let (s, c) = trig_pair(r);
        s.powf(self.l as f64 + 2.0) * c.powf(0.5 * (self.d as f64 - 3.0)) * self.bracket_closed(s, c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleFamily {
    ScalarGb,
    PsiZero,
    SingletonGb,
    GaugeGb,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleModeSpec {
    pub family: DipoleFamily,
    pub d: u32,
    pub l: u32,
    pub k: u32,
    pub a: f64,
}

impl DipoleModeSpec {
    pub fn new(family: DipoleFamily, d: u32, l: u32, k: u32, a: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidSpec("dipole modes require d >= 3".into()));
        }
        if matches!(family, DipoleFamily::SingletonGb | DipoleFamily::PsiZero) && k != 0 {
            return Err(Error::InvalidSpec(format!("{family:?} requires k = 0")));
        }
        if !(a > 0.0) {
            return Err(Error::InvalidSpec(format!("a must be positive, got {a}")));
        }
        Ok(DipoleModeSpec { family, d, l, k, a })
    }

    pub fn frequency(&self) -> f64 {
        let df = self.d as f64;
        let lf = self.l as f64;
        let kf = self.k as f64;
        match self.family {
            DipoleFamily::ScalarGb | DipoleFamily::GaugeGb => 0.5 * (df + 1.0) + lf + 2.0 * kf,
            DipoleFamily::PsiZero | DipoleFamily::SingletonGb => 0.5 * (df - 3.0) + lf,
        }
    }

    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> Result<T> {
        Ok(match self.family {
            DipoleFamily::ScalarGb => scalar_mode(self.d, self.l, self.k)?.0.eval_sc(s, c),
            DipoleFamily::PsiZero => psi0_mode(self.d, self.l)?.eval_sc(s, c),
            DipoleFamily::SingletonGb => {
                radial_profile(&ModeSpec::fixed(Family::Singleton, self.d, self.l, 0, self.a)?)?
                    .eval_sc(s, c)
            }
            DipoleFamily::GaugeGb => {
                radial_profile(&ModeSpec::fixed(Family::Gauge, self.d, self.l, self.k, self.a)?)?
                    .eval_sc(s, c)
            }
        })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let (s, c) = trig_pair(r);
        self.eval_sc(s, c)
    }

    /// Q² residual at r using the printed quartic coefficients.
    pub fn quartic_residual(&self, r: f64) -> Result<Residual> {
        let e0 = 0.5 * (self.d as f64 - 3.0);
        let lambda = self.a * self.a * e0 * (e0 - self.d as f64 + 1.0);
        let qc = quartic_coeffs(self.d, lambda, self.a, self.frequency(), self.l, r);
        let (s, c) = trig_pair(r);
        let (sj, cj) = Jet::trig_pair(s, c);
        Ok(qc.apply(&self.eval_sc(sj, cj)?))
    }
}

/// W = scalar ⊕ singleton ⊕ gauge for one l.
pub fn triplet_space(d: u32, l: u32, kmax: u32, a: f64) -> Result<Vec<DipoleModeSpec>> {
    let mut out = Vec::new();
    for k in 0..=kmax {
        out.push(DipoleModeSpec::new(DipoleFamily::ScalarGb, d, l, k, a)?);
    }
    out.push(DipoleModeSpec::new(DipoleFamily::SingletonGb, d, l, 0, a)?);
    for k in 0..=kmax {
        out.push(DipoleModeSpec::new(DipoleFamily::GaugeGb, d, l, k, a)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub r: f64,
    pub theta: f64,
    /// e^{−it/2} component of M₃⁻Ψ⁽⁰⁾₀.
    pub positive: f64,
    /// e^{+it/2} component of M₃⁻Ψ⁽⁰⁾₀.
    pub negative: f64,
    /// e^{+it/2} component of M₃⁻ applied to the singleton ground state.
    pub singleton_negative: f64,
    /// |M₃⁺Ψ⁽⁰⁾₀ − (3i/5)Ψ⁽⁰⁾₁ + 2i F₁^{singleton}| at t = 0.
    pub raise_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeEnergyReport {
    pub samples: Vec<ProbeSample>,
    pub negative_min: f64,
    pub noise_floor: f64,
    pub singleton_negative_max: f64,
    pub raise_residual_max: f64,
}

impl NegativeEnergyReport {
    pub fn confirms_exclusion(&self) -> bool {
        self.negative_min > 10.0 * self.noise_floor
    }
}

/// Components (e^{−iωt}, e^{+iωt}) of a field sampled at t = 0 and t = π/(2ω).
pub fn split_frequency(g0: Complex64, g1: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    (0.5 * (g0 + i * g1), 0.5 * (g0 - i * g1))
}

pub fn negative_energy_probe(grid: &[(f64, f64)], step: f64) -> Result<NegativeEnergyReport> {
    let psi0 = psi0_mode(4, 0)?;
    let psi1 = psi0_mode(4, 1)?;
    let psi0_field = FnField::new(move |p: &Point| {
        Complex64::from_polar(psi0.eval(p.r), -0.5 * p.t)
    });
    let ground = FnField::new(|p: &Point| Complex64::from_polar(p.r.cos().sqrt(), -0.5 * p.t));
    let period = std::f64::consts::PI;
    let mut samples = Vec::with_capacity(grid.len());
    let mut noise = 0.0f64;
    for &(r, theta) in grid {
        let at = |t: f64| Point::new(t, r, vec![theta, 0.7]);
        let lower = |f: &dyn FieldEvaluator, t: f64, h: f64| {
            ladder_apply_d4(f, &at(t), LadderDirection::Lower, 3, h)
        };
        let (pos, neg) = split_frequency(lower(&psi0_field, 0.0, step)?, lower(&psi0_field, period, step)?);
        let (pos2, neg2) =
            split_frequency(lower(&psi0_field, 0.0, 2.0 * step)?, lower(&psi0_field, period, 2.0 * step)?);
        let (_, sneg) = split_frequency(lower(&ground, 0.0, step)?, lower(&ground, period, step)?);
        noise = noise.max((pos - pos2).norm()).max((neg - neg2).norm()).max(sneg.norm());
        let raised = ladder_apply_d4(&psi0_field, &at(0.0), LadderDirection::Raise, 3, step)?;
        let (s, c) = trig_pair(r);
        let expect = Complex64::i() * theta.cos() * (0.6 * psi1.eval(r) - 2.0 * s * c.sqrt());
        samples.push(ProbeSample {
            r,
            theta,
            positive: pos.norm(),
            negative: neg.norm(),
            singleton_negative: sneg.norm(),
            raise_residual: (raised - expect).norm(),
        });
    }
    let fold = |f: &dyn Fn(&ProbeSample) -> f64, init: f64, min: bool| {
        samples.iter().map(f).fold(init, |m, v| if min { m.min(v) } else { m.max(v) })
    };
    Ok(NegativeEnergyReport {
        negative_min: fold(&|s| s.negative, f64::INFINITY, true),
        noise_floor: noise,
        singleton_negative_max: fold(&|s| s.singleton_negative, 0.0, false),
        raise_residual_max: fold(&|s| s.raise_residual, 0.0, false),
        samples,
    })
}

pub fn default_probe_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::new();
    for &r in &[0.3, 0.6, 0.9, 1.2] {
        for &th in &[0.4, 1.0, 2.3] {
            g.push((r, th));
        }
    }
    g
}

pub fn negative_energy_probe_default() -> Result<NegativeEnergyReport> {
    negative_energy_probe(&default_probe_grid(), DEFAULT_STEP)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialCheck {
    /// Leading coefficients αᵢ of aᵢ(r) ~ αᵢ r^{i−4} as r → 0.
    pub leading: [f64; 5],
    pub expected_roots: [f64; 4],
    /// max |P(ρ) − α₄ Π(ρ − ρᵢ)| / scale over probe points.
    pub mismatch: f64,
}

fn falling(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |p, j| p * (x - j as f64))
}

/// Indicial polynomial of the quartic operator at r = 0, compared with the
/// roots {l, l+2, 3−d−l, 5−d−l}.
pub fn indicial_check(d: u32, e0: f64, l: u32, omega: f64) -> IndicialCheck {
    let lambda = e0 * (e0 - d as f64 + 1.0);
    let lead = |r: f64| {
        let q = quartic_coeffs(d, lambda, 1.0, omega, l, r);
        [q.a0 * r.powi(4), q.a1 * r.powi(3), q.a2 * r * r, q.a3 * r, q.a4]
    };
    // Each rⁱ⁻⁴-scaled coefficient is even in r; extrapolate in r².
    let (h1, h2) = (1e-3, 5e-4);
    let (v1, v2) = (lead(h1), lead(h2));
    let mut leading = [0.0; 5];
    for i in 0..5 {
        leading[i] = v2[i] + (v2[i] - v1[i]) / 3.0;
    }
    let (df, lf) = (d as f64, l as f64);
    let roots = [lf, lf + 2.0, 3.0 - df - lf, 5.0 - df - lf];
    let mut mismatch = 0.0f64;
    for &x in &[-3.3, -1.1, 0.4, 1.7, 2.9, 4.6] {
        let p: f64 = (0..5).map(|i| leading[i] * falling(x, i)).sum();
        let scale: f64 = (0..5).map(|i| (leading[i] * falling(x, i)).abs()).fold(0.0, f64::max);
        let q = leading[4] * roots.iter().map(|r| x - r).product::<f64>();
        mismatch = mismatch.max((p - q).abs() / scale.max(1.0));
    }
    IndicialCheck {
        leading,
        expected_roots: roots,
        mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::apply_q;
    use crate::specfun::lerch_phi;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn quartic_matches_composition() {
        for &(d, e0, l, omega) in &[(4u32, 0.5, 0u32, 1.3), (5, 1.7, 2, 0.4), (3, 0.2, 1, 2.2)] {
            let lam = e0 * (e0 - d as f64 + 1.0);
            let f = |s: Jet, c: Jet| s.powf(1.3) * c.powf(0.8) * (s * c + 2.0).ln();
            for r in [0.2, 0.7, 1.3] {
                let qc = quartic_coeffs(d, lam, 1.0, omega, l, r);
                assert!((qc.a4 - trig_pair(r).1.powi(4)).abs() < 1e-15);
                let (s, c) = trig_pair(r);
                let (sj, cj) = Jet::trig_pair(s, c);
                let res = qc.apply(&f(sj, cj));
                let comp = q_squared(d, l, lam, omega, r, f);
                assert!(
                    (res.value - comp).abs() < 1e-9 * res.scale,
                    "d={d} r={r}: {} vs {comp}",
                    res.value
                );
            }
        }
    }

    #[test]
    fn quartic_annihilates_second_order_modes() {
        let spec = ModeSpec::new(Family::Dirichlet, 4, 2.0, 1, 2, 1.0).unwrap();
        let prof = radial_profile(&spec).unwrap();
        let omega = crate::modes::frequency(&spec).unwrap();
        for r in [0.3, 0.8, 1.4] {
            let qc = quartic_coeffs(4, -2.0, 1.0, omega, 1, r);
            let res = qc.apply(&prof.jet(r));
            assert!(res.relative() < 1e-8);
        }
    }

    #[test]
    fn psi2_printed_coefficients() {
        for &(d, e0, l, w) in &[(4u32, 0.5, 0u32, 1.3), (5, 2.2, 1, 3.1), (7, 1.1, 3, 0.3)] {
            let p = psi2_series(d, e0, l, w, 10).unwrap();
            let (df, lf) = (d as f64, l as f64);
            let c1 = ((e0 + lf + 1.0).powi(2) + 2.0 * lf + df - w * w) / (2.0 * (2.0 * lf + df + 1.0));
            let r0 = -(16.0 * e0 * e0 + 8.0 * e0 * (6.0 * lf + df + 11.0) + 12.0 * lf * lf
                - 12.0 * lf * (df - 9.0)
                - 5.0 * (df - 1.0).powi(2)
                + 128.0)
                / 3.0;
            let c2 = ((w * w - (e0 + lf + 2.0).powi(2) - 2.0 * lf - df - 3.0).powi(2) + r0)
                / (8.0 * (2.0 * lf + df + 1.0) * (2.0 * lf + df + 3.0));
            assert_eq!(p.coefficients[0], 1.0);
            assert!((p.coefficients[1] - c1).abs() < 1e-12 * c1.abs().max(1.0));
            assert!((p.coefficients[2] - c2).abs() < 1e-12 * c2.abs().max(1.0));
        }
    }

    #[test]
    fn psi2_sources_psi1() {
        let p = psi2_series(5, 1.3, 1, 2.7, 400).unwrap();
        let lam = 1.3 * (1.3 - 4.0);
        for r in [0.2, 0.6, 1.0] {
            let (s, c) = trig_pair(r);
            let (sj, cj) = Jet::trig_pair(s, c);
            let q = apply_q(5, 1, lam, 2.7, r, |s, c| p.eval_sc(s, c).unwrap());
            let psi1: Jet = p.psi1_sc(sj, cj).unwrap();
            let ratio = c * c * q.value / psi1.value();
            assert!((ratio - p.source_constant).abs() < 1e-9 * ratio.abs());
        }
        assert!(p.eval(1.55).is_err());
    }

    #[test]
    fn psi2_singleton_matches_series() {
        for &(d, l, w) in &[(4u32, 0u32, 0.9), (6, 1, 2.3)] {
            let e0 = 0.5 * (d as f64 - 3.0);
            let ser = psi2_series(d, e0, l, w, 600).unwrap();
            let hyp = psi2_singleton(d, l, w, false).unwrap();
            for r in [0.3, 0.9] {
                let (a, b) = (ser.eval(r).unwrap(), hyp.eval(r).unwrap());
                assert!((a - b).abs() < 1e-10 * a.abs());
            }
        }
        assert!(psi2_singleton(4, 0, 0.5, true).unwrap().is_zero());
        assert_eq!(psi2_singleton(4, 0, 0.5, true).unwrap().eval(0.7).unwrap(), 0.0);
        assert!(!psi2_singleton(4, 0, 2.5, true).unwrap().is_zero());
    }

    #[test]
    fn scalar_mode_is_polynomial_psi2() {
        for &(d, l, k) in &[(4u32, 0u32, 0u32), (4, 1, 2), (5, 2, 1)] {
            let (prof, w) = scalar_mode(d, l, k).unwrap();
            let hyp = psi2_singleton(d, l, w, false).unwrap();
            let ratio0 = prof.eval(0.3) / hyp.eval(0.3).unwrap();
            for r in [0.7, 1.2, 1.5] {
                let ratio = prof.eval(r) / hyp.eval(r).unwrap();
                assert!((ratio - ratio0).abs() < 1e-10 * ratio0.abs());
            }
        }
        let (p, w) = scalar_mode(4, 0, 0).unwrap();
        assert_eq!(w, 2.5);
        let r: f64 = 0.8;
        assert!((p.eval(r) - r.sin().powi(2) * r.cos().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scalar_is_sourced_by_gauge() {
        let (d, l, k) = (5, 1, 1);
        let (prof, w) = scalar_mode(d, l, k).unwrap();
        let gauge = radial_profile(&ModeSpec::fixed(Family::Gauge, d, l, k, 1.0).unwrap()).unwrap();
        let lam = 1.0 * (1.0 - 4.0);
        let mut ratios = vec![];
        for r in [0.3, 0.8, 1.3] {
            let q = apply_q(d, l, lam, w, r, |s, c| prof.eval_sc(s, c));
            assert!(q.relative() > 1e-3);
            ratios.push(r.cos().powi(2) * q.value / gauge.eval(r));
        }
        for x in &ratios {
            assert!((x - ratios[0]).abs() < 1e-9 * ratios[0].abs());
        }
    }

    #[test]
    fn psi0_forms_agree() {
        let p = psi0_mode(4, 0).unwrap();
        let r = FRAC_PI_4;
        let s = r.sin();
        let add1 = 3.0 * r.cos().sqrt() * (s.atanh() / s - 1.0);
        assert!((p.eval(r) - add1).abs() < 1e-13);
        assert!((p.eval(r) - 0.621_7).abs() < 1e-4);
        assert!((p.eval_closed(r) - add1).abs() < 1e-13);
        let a = p.lerch_a();
        let lerch = s * s * r.cos().sqrt() * a * lerch_phi(s * s, 1.0, a, &SeriesConfig::default()).unwrap();
        assert!((p.eval(r) - lerch).abs() < 1e-13);
        for &(d, l) in &[(3u32, 0u32), (5, 0), (5, 2), (4, 1), (6, 2), (7, 1)] {
            let q = psi0_mode(d, l).unwrap();
            let a = q.lerch_a();
            for r in [0.4, 0.7, 1.0, 1.3] {
                let (s, c) = trig_pair(r);
                let x = s * s;
                let lerch = s.powf(l as f64 + 2.0)
                    * c.powf(0.5 * (d as f64 - 3.0))
                    * a
                    * lerch_phi(x, 1.0, a, &SeriesConfig::default()).unwrap();
                assert!((q.eval_closed(r) - lerch).abs() < 1e-9 * lerch.abs(), "d={d} l={l} r={r}");
                assert!((q.eval(r) - lerch).abs() < 1e-12 * lerch.abs());
            }
        }
    }

    #[test]
    fn psi0_is_psi2_at_singleton_frequency() {
        for &(d, l) in &[(4u32, 0u32), (5, 1)] {
            let q = psi0_mode(d, l).unwrap();
            let h = psi2_singleton(d, l, q.frequency(), false).unwrap();
            for r in [0.3, 0.9, 1.4] {
                assert!((q.eval(r) - h.eval(r).unwrap()).abs() < 1e-10 * q.eval(r).abs());
            }
        }
    }

    #[test]
    fn triplet_members_solve_quartic() {
        let w = triplet_space(4, 0, 2, 1.0).unwrap();
        assert_eq!(w.len(), 7);
        assert!(w.iter().all(|m| m.family != DipoleFamily::PsiZero));
        for &(d, l) in &[(4u32, 0u32), (5, 1), (6, 2)] {
            let mut members = triplet_space(d, l, 2, 1.0).unwrap();
            members.push(DipoleModeSpec::new(DipoleFamily::PsiZero, d, l, 0, 1.0).unwrap());
            for m in &members {
                for r in [0.2, 0.7, 1.2] {
                    let res = m.quartic_residual(r).unwrap();
                    assert!(res.relative() < 1e-8, "{m:?} at {r}: {res:?}");
                }
            }
        }
    }

    #[test]
    fn only_gauge_survives_vanishing_flux() {
        let d = 5;
        let expected = 0.5 * (d as f64 + 1.0);
        for m in triplet_space(d, 1, 2, 1.0).unwrap() {
            let (r1, r2) = (std::f64::consts::FRAC_PI_2 - 1e-3, std::f64::consts::FRAC_PI_2 - 2e-3);
            let slope = (m.eval(r1).unwrap().abs().ln() - m.eval(r2).unwrap().abs().ln())
                / ((1e-3f64).ln() - (2e-3f64).ln());
            let decays = (slope - expected).abs() < 1e-3;
            assert_eq!(decays, m.family == DipoleFamily::GaugeGb, "{m:?}: slope {slope}");
        }
    }

    #[test]
    fn indicial_roots() {
        for &(d, e0, l, w) in &[(4u32, 0.5, 0u32, 1.3), (5, 2.2, 1, 3.1), (7, 1.1, 3, 0.3)] {
            let c = indicial_check(d, e0, l, w);
            assert!(c.mismatch < 1e-5, "{c:?}");
            assert!((c.leading[4] - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn negative_energy_is_detected() {
        let rep = negative_energy_probe_default().unwrap();
        assert!(rep.confirms_exclusion(), "{rep:?}");
        assert!(rep.singleton_negative_max < 1e-8);
        assert!(rep.raise_residual_max < 1e-7, "{}", rep.raise_residual_max);
        for s in &rep.samples {
            assert!(s.positive < 1e-8);
        }
    }
}
