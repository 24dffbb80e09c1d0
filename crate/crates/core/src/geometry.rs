//! Global coordinates on CAdS_d, the embedding hyperboloid, the invariant Z,
//! and finite-difference application of the Laplacian and of the d = 4
//! energy ladder operators.

use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, gegenbauer_c};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub r: f64,
    /// Polar angles θ₁, …, θ_{d−2} of S^{d−2}; the last one is azimuthal.
    pub angles: Vec<f64>,
}

impl Point {
    pub fn new(t: f64, r: f64, angles: Vec<f64>) -> Self {
        Point { t, r, angles }
    }

    pub fn origin(d: u32) -> Self {
        Point {
            t: 0.0,
            r: 0.0,
            angles: vec![0.0; d.saturating_sub(2) as usize],
        }
    }

    pub fn validate(&self, d: u32) -> Result<()> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
        }
        if !(self.r >= 0.0 && self.r < FRAC_PI_2) {
            return Err(Error::Domain(format!("r = {} outside [0, π/2)", self.r)));
        }
        let n = d as usize - 2;
        if self.angles.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} sphere angles for d = {d}, got {}",
                self.angles.len()
            )));
        }
        for (i, &a) in self.angles.iter().enumerate() {
            let max = if i + 1 == n { 2.0 * PI } else { PI };
            let ok = if i + 1 == n { (0.0..max).contains(&a) } else { (0.0..=max).contains(&a) };
            if !ok {
                return Err(Error::Domain(format!("angle {} = {a} outside its chart", i + 1)));
            }
        }
        Ok(())
    }

    fn shifted(&self, dt: f64, dr: f64, dangle: Option<(usize, f64)>) -> Point {
        let mut q = self.clone();
        q.t += dt;
        q.r += dr;
        if let Some((i, h)) = dangle {
            q.angles[i] += h;
        }
        q
    }
}

/// Unit vector z/r on S^{d−2} ⊂ R^{d−1}, components z¹…z^{d−1}.
///
/// z^{d−1} = cos θ₁, z^{d−2} = sin θ₁ cos θ₂, …, and the last two angles
/// close the chain as z¹ = … cos θ_{d−2}, z² = … sin θ_{d−2}.
pub fn sphere_direction(d: u32, angles: &[f64]) -> Vec<f64> {
    let n = d as usize - 1;
    if n == 1 {
        return vec![1.0];
    }
    let mut z = vec![0.0; n];
    let mut prod = 1.0;
    for j in 0..n - 2 {
        z[n - 1 - j] = prod * angles[j].cos();
        prod *= angles[j].sin();
    }
    let last = angles[n - 2];
    z[0] = prod * last.cos();
    z[1] = prod * last.sin();
    z
}

/// Embedding vector (X⁰, X¹, …, X^d) with metric diag(+, −, …, −, +).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(pub Vec<f64>);

impl EmbeddingVector {
    pub fn dot(&self, other: &EmbeddingVector) -> f64 {
        let x = &self.0;
        let y = &other.0;
        let last = x.len() - 1;
        let mut s = x[0] * y[0] + x[last] * y[last];
        for i in 1..last {
            s -= x[i] * y[i];
        }
        s
    }
}

pub fn embed(p: &Point, d: u32, a: f64) -> Result<EmbeddingVector> {
    p.validate(d)?;
    let sec = 1.0 / p.r.cos();
    let tan = p.r.tan();
    let mut x = Vec::with_capacity(d as usize + 1);
    x.push(sec * p.t.sin() / a);
    for zi in sphere_direction(d, &p.angles) {
        x.push(tan * zi / a);
    }
    x.push(-sec * p.t.cos() / a);
    Ok(EmbeddingVector(x))
}

/// Z = a² η(X, Y).
pub fn invariant_z(x: &Point, y: &Point, d: u32, a: f64) -> Result<f64> {
    x.validate(d)?;
    y.validate(d)?;
    let nx = sphere_direction(d, &x.angles);
    let ny = sphere_direction(d, &y.angles);
    let dot: f64 = nx.iter().zip(&ny).map(|(u, v)| u * v).sum();
    let _ = a;
    Ok(((x.t - y.t).cos() - x.r.sin() * y.r.sin() * dot) / (x.r.cos() * y.r.cos()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConstants {
    pub scalar_curvature: f64,
    pub ricci_factor: f64,
    pub lambda_cosm: f64,
}

pub fn curvature(d: u32, a: f64) -> Result<CurvatureConstants> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
    }
    let df = d as f64;
    Ok(CurvatureConstants {
        scalar_curvature: df * (df - 1.0) * a * a,
        ricci_factor: (df - 1.0) * a * a,
        lambda_cosm: (df - 2.0) * (df - 1.0) * a * a / 2.0,
    })
}

/// Unit-normalized real zonal harmonic of degree l on S^{d−2}, as a function
/// of the first polar angle.
pub fn zonal_harmonic(d: u32, l: u32, theta: f64) -> f64 {
    match d {
        0..=2 => 1.0,
        3 => {
            if l == 0 {
                1.0 / (2.0 * PI).sqrt()
            } else {
                (l as f64 * theta).cos() / PI.sqrt()
            }
        }
        _ => {
            let n = (d - 2) as f64;
            let lam = 0.5 * (n - 1.0);
            let lf = l as f64;
            let vol_sub = 2.0 * PI.powf(0.5 * n) / gamma_fn(0.5 * n).expect("positive");
            let g = |x: f64| gamma_fn(x).expect("positive");
            let norm2 = vol_sub * PI * 2f64.powf(1.0 - 2.0 * lam) * g(lf + 2.0 * lam)
                / (g(lf + 1.0) * (lf + lam) * g(lam) * g(lam));
            gegenbauer_c(l, lam, theta.cos()) / norm2.sqrt()
        }
    }
}

/// A complex field on CAdS_d, optionally tagged with the degree of the zonal
/// harmonic it carries.
pub trait FieldEvaluator: Sync {
    fn eval(&self, p: &Point) -> Complex64;
    fn angular_degree(&self) -> Option<u32> {
        None
    }
}

pub struct FnField<F> {
    f: F,
    l: Option<u32>,
}

impl<F: Fn(&Point) -> Complex64 + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        FnField { f, l: None }
    }

    pub fn with_degree(f: F, l: u32) -> Self {
        FnField { f, l: Some(l) }
    }
}

impl<F: Fn(&Point) -> Complex64 + Sync> FieldEvaluator for FnField<F> {
    fn eval(&self, p: &Point) -> Complex64 {
        (self.f)(p)
    }
    fn angular_degree(&self) -> Option<u32> {
        self.l
    }
}

#[derive(Clone, Copy)]
enum Coord {
    T,
    R,
    Angle(usize),
}

fn shift(p: &Point, c: Coord, h: f64) -> Point {
    match c {
        Coord::T => p.shifted(h, 0.0, None),
        Coord::R => p.shifted(0.0, h, None),
        Coord::Angle(i) => p.shifted(0.0, 0.0, Some((i, h))),
    }
}

fn check_chart(p: &Point, c: Coord, h: f64) -> Result<()> {
    match c {
        Coord::T => Ok(()),
        Coord::R => {
            if p.r - h <= 0.0 || p.r + h >= FRAC_PI_2 {
                Err(Error::ChartBoundary(format!("r = {} with step {h}", p.r)))
            } else {
                Ok(())
            }
        }
        Coord::Angle(i) => {
            let a = p.angles[i];
            let last = i + 1 == p.angles.len();
            if !last && (a - h <= 0.0 || a + h >= PI) {
                Err(Error::ChartBoundary(format!("angle {} = {a} with step {h}", i + 1)))
            } else {
                Ok(())
            }
        }
    }
}

fn d1(f: &dyn FieldEvaluator, p: &Point, c: Coord, h: f64) -> Complex64 {
    let dh = |h: f64| (f.eval(&shift(p, c, h)) - f.eval(&shift(p, c, -h))) / (2.0 * h);
    let coarse = dh(h);
    let fine = dh(0.5 * h);
    fine + (fine - coarse) / 3.0
}

fn d2(f: &dyn FieldEvaluator, p: &Point, c: Coord, h: f64) -> Complex64 {
    let f0 = f.eval(p);
    let dh = |h: f64| (f.eval(&shift(p, c, h)) - 2.0 * f0 + f.eval(&shift(p, c, -h))) / (h * h);
    let coarse = dh(h);
    let fine = dh(0.5 * h);
    fine + (fine - coarse) / 3.0
}

/// □F at `p` for a field carrying a zonal harmonic of known degree.
pub fn laplacian_apply(
    f: &dyn FieldEvaluator,
    p: &Point,
    d: u32,
    a: f64,
    step: f64,
) -> Result<Complex64> {
    p.validate(d)?;
    check_chart(p, Coord::R, step)?;
    let l = f.angular_degree().ok_or_else(|| {
        Error::Domain("laplacian_apply needs a field tagged with its harmonic degree".into())
    })? as f64;
    let df = d as f64;
    let (s, c) = (p.r.sin(), p.r.cos());
    let cot = c / s;
    let ftt = d2(f, p, Coord::T, step);
    let frr = d2(f, p, Coord::R, step);
    let fr = d1(f, p, Coord::R, step);
    let ang = -l * (l + df - 3.0) * f.eval(p);
    Ok(a * a * (-c * c * (ftt - frr) + (df - 2.0) * cot * fr + cot * cot * ang))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderDirection {
    Raise,
    Lower,
}

/// M_k^± F at `p` for d = 4, with angles (θ, φ).
pub fn ladder_apply_d4(
    f: &dyn FieldEvaluator,
    p: &Point,
    direction: LadderDirection,
    axis: u8,
    step: f64,
) -> Result<Complex64> {
    p.validate(4)?;
    check_chart(p, Coord::R, step)?;
    let (theta, phi) = (p.angles[0], p.angles[1]);
    if !(1..=3).contains(&axis) {
        return Err(Error::Domain(format!("ladder axis must be 1, 2 or 3, got {axis}")));
    }
    if theta.sin() < 1e-6 {
        return Err(Error::ChartBoundary(format!("coordinate pole at θ = {theta}")));
    }
    check_chart(p, Coord::Angle(0), step)?;
    let (s, c) = (p.r.sin(), p.r.cos());
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let ft = d1(f, p, Coord::T, step);
    let fr = d1(f, p, Coord::R, step);
    let fth = d1(f, p, Coord::Angle(0), step);
    let (n_k, rk) = match axis {
        1 => {
            let fph = d1(f, p, Coord::Angle(1), step);
            (st * cp, st * cp * c * fr + ct * cp / s * fth - sp / (s * st) * fph)
        }
        2 => {
            let fph = d1(f, p, Coord::Angle(1), step);
            (st * sp, st * sp * c * fr + ct * sp / s * fth + cp / (s * st) * fph)
        }
        _ => (ct, ct * c * fr - st / s * fth),
    };
    let sign = match direction {
        LadderDirection::Raise => 1.0,
        LadderDirection::Lower => -1.0,
    };
    let phase = Complex64::from_polar(1.0, -sign * p.t);
    let i = Complex64::i();
    Ok(-phase * s * n_k * ft - sign * i * phase * rk)
}

/// i∂_t F, the energy operator.
pub fn energy_apply(f: &dyn FieldEvaluator, p: &Point, step: f64) -> Complex64 {
    Complex64::i() * d1(f, p, Coord::T, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_embeds_to_pole() {
        let x = embed(&Point::origin(4), 4, 2.0).unwrap();
        assert_eq!(x.0, vec![0.0, 0.0, 0.0, 0.0, -0.5]);
        assert!((x.dot(&x) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn z_against_origin() {
        let p = Point::new(0.3, 0.5, vec![1.0, 2.0]);
        let z = invariant_z(&p, &Point::origin(4), 4, 1.0).unwrap();
        assert!((z - 0.3f64.cos() / 0.5f64.cos()).abs() < 1e-15);
        assert!((z - 1.088_600_13).abs() < 1e-6);
        assert!((invariant_z(&p, &p, 4, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn curvature_constants() {
        let c = curvature(4, 1.0).unwrap();
        assert_eq!(c.scalar_curvature, 12.0);
        assert_eq!(c.lambda_cosm, 3.0);
        assert_eq!(curvature(2, 1.0).unwrap().lambda_cosm, 0.0);
    }

    #[test]
    fn zonal_harmonics_are_unit_normalized() {
        // d = 4: Y_l = √((2l+1)/4π) P_l(cos θ)
        let y = zonal_harmonic(4, 2, 0.4);
        let p2 = 0.5 * (3.0 * 0.4f64.cos().powi(2) - 1.0);
        assert!((y - (5.0 / (4.0 * PI)).sqrt() * p2).abs() < 1e-14);
        assert!((zonal_harmonic(3, 0, 1.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn plane_wave_laplacian() {
        let omega = 1.7;
        let f = FnField::with_degree(|p: &Point| Complex64::from_polar(1.0, -omega * p.t), 0);
        let p = Point::new(0.2, 0.9, vec![1.0, 0.5]);
        let v = laplacian_apply(&f, &p, 4, 1.0, DEFAULT_STEP).unwrap();
        let want = omega * omega * 0.9f64.cos().powi(2) * f.eval(&p);
        assert!((v - want).norm() < 1e-9);
        let near = Point::new(0.0, 1e-4, vec![1.0, 0.5]);
        assert!(matches!(
            laplacian_apply(&f, &near, 4, 1.0, DEFAULT_STEP),
            Err(Error::ChartBoundary(_))
        ));
    }

    fn scalar_d4() -> impl Fn(&Point) -> Complex64 + Sync {
        |p: &Point| {
            let (s, c) = (p.r.sin(), p.r.cos());
            Complex64::from_polar(s * s * c.sqrt(), -2.5 * p.t)
        }
    }

    #[test]
    fn lowering_scalar_gives_singleton() {
        let f = FnField::new(scalar_d4());
        let p = Point::new(0.4, 0.6, vec![0.8, 1.1]);
        let v = ladder_apply_d4(&f, &p, LadderDirection::Lower, 3, DEFAULT_STEP).unwrap();
        let want = 2.0
            * Complex64::i()
            * Complex64::from_polar(0.6f64.sin() * 0.6f64.cos().sqrt() * 0.8f64.cos(), -1.5 * 0.4);
        assert!((v - want).norm() < 1e-10, "{v} vs {want}");
    }

    #[test]
    fn singleton_ground_state_is_annihilated() {
        let f = FnField::new(|p: &Point| Complex64::from_polar(p.r.cos().sqrt(), -0.5 * p.t));
        let p = Point::new(0.1, 0.9, vec![2.0, 4.0]);
        for axis in 1..=3 {
            let v = ladder_apply_d4(&f, &p, LadderDirection::Lower, axis, DEFAULT_STEP).unwrap();
            assert!(v.norm() < 1e-10);
        }
        let pole = Point::new(0.1, 0.9, vec![0.0, 4.0]);
        assert!(ladder_apply_d4(&f, &pole, LadderDirection::Lower, 3, DEFAULT_STEP).is_err());
    }

    #[test]
    fn energy_eigenvalue() {
        let f = FnField::new(|p: &Point| Complex64::from_polar(p.r.cos(), -1.5 * p.t));
        let p = Point::new(0.3, 0.2, vec![1.0, 1.0]);
        assert!((energy_apply(&f, &p, DEFAULT_STEP) - 1.5 * f.eval(&p)).norm() < 1e-10);
    }

    #[test]
    fn ladder_commutator_closes_on_energy() {
        let f = FnField::new(scalar_d4());
        let h = 1e-2;
        let lower = FnField::new(|q: &Point| {
            ladder_apply_d4(&f, q, LadderDirection::Lower, 3, h).unwrap()
        });
        let raise = FnField::new(|q: &Point| {
            ladder_apply_d4(&f, q, LadderDirection::Raise, 3, h).unwrap()
        });
        let p = Point::new(0.2, 0.7, vec![1.2, 0.3]);
        let comm = ladder_apply_d4(&lower, &p, LadderDirection::Raise, 3, h).unwrap()
            - ladder_apply_d4(&raise, &p, LadderDirection::Lower, 3, h).unwrap();
        let e = energy_apply(&f, &p, h);
        assert!((comm - 2.0 * e).norm() < 1e-6, "{comm} vs {e}");
    }
}
