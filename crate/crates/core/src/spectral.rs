//! Schrödinger form of the radial equation: φ = tan^{d/2−1} r · f solves
//! −φ″ + Vφ = ω²φ.

use crate::error::{Error, Result};
use crate::geometry::{zonal_harmonic, FieldEvaluator, Point};
use crate::jet::{Jet, Real};
use crate::modes::{frequency, radial_profile, ModeSpec, RadialProfile, Residual};
use crate::quadrature::{gauss_legendre, trig_pair};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub d: u32,
    pub e0: f64,
    pub l: u32,
}

impl PotentialSpec {
    pub fn new(d: u32, e0: f64, l: u32) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidSpec(format!("the potential needs d >= 3, got {d}")));
        }
        if !e0.is_finite() {
            return Err(Error::InvalidSpec("E0 must be finite".into()));
        }
        Ok(PotentialSpec { d, e0, l })
    }

    pub fn of_mode(spec: &ModeSpec) -> Result<Self> {
        PotentialSpec::new(spec.d, spec.e0, spec.l)
    }

    fn coeffs(&self) -> (f64, f64, f64) {
        let (d, l, e0) = (self.d as f64, self.l as f64, self.e0);
        (l * (l + d - 3.0), (d - 2.0) * (d - 4.0), 2.0 - d - e0 * (e0 - d + 1.0))
    }

    pub fn eval_sc<T: Real>(&self, s: T, c: T) -> T {
        let (cl, cm, cb) = self.coeffs();
        let s2 = s * s;
        let c2 = c * c;
        let mut v = c2.powi(-1) * (-cb);
        if cl != 0.0 {
            v = v + s2.powi(-1) * cl;
        }
        if cm != 0.0 {
            v = v + (s2 * c2 * 4.0).powi(-1) * cm;
        }
        v
    }
}

pub fn potential_v(spec: &PotentialSpec, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::Domain(format!("r = {r} outside (0, π/2)")));
    }
    let (s, c) = trig_pair(r);
    Ok(spec.eval_sc(s, c))
}

/// Coefficients of 1/r² at the origin and of 1/(π/2 − r)² at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCoefficients {
    pub origin: f64,
    pub boundary: f64,
}

pub fn boundary_coefficients(spec: &PotentialSpec) -> BoundaryCoefficients {
    let (cl, cm, cb) = spec.coeffs();
    BoundaryCoefficients {
        origin: cl + 0.25 * cm,
        boundary: 0.25 * cm - cb,
    }
}

pub fn level_energies(spec: &PotentialSpec, kmax: u32) -> Vec<f64> {
    (0..=kmax)
        .map(|k| (spec.e0 + spec.l as f64 + 2.0 * k as f64).powi(2))
        .collect()
}

/// A mode in Schrödinger form.
#[derive(Clone, Debug, PartialEq)]
pub struct SchrodingerMode {
    pub spec: ModeSpec,
    pub potential: PotentialSpec,
    pub profile: RadialProfile,
    pub omega: f64,
}

pub fn schrodinger_transform(spec: &ModeSpec) -> Result<SchrodingerMode> {
    spec.validate()?;
    Ok(SchrodingerMode {
        spec: *spec,
        potential: PotentialSpec::of_mode(spec)?,
        profile: radial_profile(spec)?,
        omega: frequency(spec)?,
    })
}

impl SchrodingerMode {
    fn phi_sc<T: Real>(&self, s: T, c: T) -> T {
        let p = 0.5 * self.spec.d as f64 - 1.0;
        (s / c).powf(p) * self.profile.eval_sc(s, c)
    }

    pub fn phi(&self, r: f64) -> f64 {
        let (s, c) = trig_pair(r);
        self.phi_sc(s, c)
    }

    /// −φ″ + Vφ − ω²φ with exact derivatives.
    pub fn residual(&self, r: f64) -> Result<Residual> {
        if !(r > 0.0 && r < FRAC_PI_2) {
            return Err(Error::Domain(format!("r = {r} outside (0, π/2)")));
        }
        let (s, c) = trig_pair(r);
        let (sj, cj) = Jet::trig_pair(s, c);
        let phi = self.phi_sc(sj, cj);
        let kin = -phi.deriv(2);
        let pot = self.potential.eval_sc(s, c) * phi.0[0];
        let en = -self.omega * self.omega * phi.0[0];
        Ok(Residual {
            value: kin + pot + en,
            scale: kin.abs().max(pot.abs()).max(en.abs()),
        })
    }

    /// ∫₀^{upper} φ² dr by Gauss–Legendre.
    pub fn square_integral(&self, upper: f64, nodes: usize) -> Result<f64> {
        if !(upper > 0.0 && upper < FRAC_PI_2) {
            return Err(Error::Domain(format!("upper limit {upper} outside (0, π/2)")));
        }
        let (x, w) = gauss_legendre(nodes);
        let h = 0.5 * upper;
        Ok(x.iter().zip(&w).map(|(&xi, &wi)| h * wi * self.phi(h * (xi + 1.0)).powi(2)).sum())
    }
}

impl FieldEvaluator for SchrodingerMode {
    fn eval(&self, p: &Point) -> Complex64 {
        let th = p.angles.first().copied().unwrap_or(0.0);
        Complex64::from_polar(self.phi(p.r) * zonal_harmonic(self.spec.d, self.spec.l, th), -self.omega * p.t)
    }

    fn angular_degree(&self) -> Option<u32> {
        Some(self.spec.l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfimumLocation {
    Interior,
    /// Approached as r → 0.
    Origin,
    /// Approached as r → π/2.
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialMinimum {
    pub value: f64,
    pub argmin: f64,
    pub location: InfimumLocation,
}

const GRID: usize = 2048;

/// Infimum of V over (0, π/2): log-spaced grid toward both endpoints, then
/// golden-section refinement.
pub fn minimize_potential(spec: &PotentialSpec) -> Result<PotentialMinimum> {
    let half = GRID / 2;
    let lo = 1e-8f64;
    let step = (std::f64::consts::FRAC_PI_4 / lo).ln() / (half - 1) as f64;
    let mut grid: Vec<f64> = (0..half).map(|i| lo * (step * i as f64).exp()).collect();
    let right: Vec<f64> = grid.iter().rev().skip(1).map(|&u| FRAC_PI_2 - u).collect();
    grid.extend(right);
    let vals: Vec<f64> = grid.iter().map(|&r| potential_v(spec, r)).collect::<Result<_>>()?;
    let (imin, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    let n = grid.len();
    if imin == 0 || imin == n - 1 {
        let location = if imin == 0 { InfimumLocation::Origin } else { InfimumLocation::Boundary };
        return Ok(PotentialMinimum { value: vals[imin], argmin: grid[imin], location });
    }
    let (mut a, mut b) = (grid[imin - 1], grid[imin + 1]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (potential_v(spec, x1)?, potential_v(spec, x2)?);
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * b.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = potential_v(spec, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = potential_v(spec, x2)?;
        }
    }
    let (argmin, value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    Ok(PotentialMinimum { value: value.min(vals[imin]), argmin, location: InfimumLocation::Interior })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingletonLevelReport {
    pub d: u32,
    pub l: u32,
    /// ((d−3)/2 + l)².
    pub energy: f64,
    pub minimum: PotentialMinimum,
    pub margin: f64,
    /// The k = 1 level ((d+1)/2 + l)², the gauge ground state.
    pub gauge_energy: f64,
    pub below: bool,
}

pub fn singleton_below_minimum(d: u32, l: u32) -> Result<SingletonLevelReport> {
    if d < 4 {
        return Err(Error::InvalidSpec(format!("needs d >= 4 so that E0 > 0, got {d}")));
    }
    let spec = PotentialSpec::new(d, 0.5 * (d as f64 - 3.0), l)?;
    let lv = level_energies(&spec, 1);
    let minimum = minimize_potential(&spec)?;
    Ok(SingletonLevelReport {
        d,
        l,
        energy: lv[0],
        minimum,
        margin: minimum.value - lv[0],
        gauge_energy: lv[1],
        below: lv[0] < minimum.value,
    })
}

pub fn singleton_level_grid(ds: &[u32], ls: &[u32]) -> Result<Vec<SingletonLevelReport>> {
    let pairs: Vec<(u32, u32)> = ds.iter().flat_map(|&d| ls.iter().map(move |&l| (d, l))).collect();
    pairs.par_iter().map(|&(d, l)| singleton_below_minimum(d, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::Family;

    #[test]
    fn potential_values() {
        let sp = PotentialSpec::new(4, 0.5, 0).unwrap();
        for &r in &[0.1, 0.7, 1.3] {
            let v = potential_v(&sp, r).unwrap();
            assert!((v - 0.75 / r.cos().powi(2)).abs() < 1e-14);
        }
        let m = minimize_potential(&sp).unwrap();
        assert!((m.value - 0.75).abs() < 1e-12);
        assert_eq!(m.location, InfimumLocation::Origin);
        assert!(potential_v(&sp, 0.0).is_err());
        let b = boundary_coefficients(&PotentialSpec::new(7, 2.0, 3).unwrap());
        assert_eq!(b.origin, 3.0 * 7.0 + 15.0 / 4.0);
    }

    #[test]
    fn boundary_coefficients_match_limits() {
        let sp = PotentialSpec::new(6, 1.7, 2).unwrap();
        let bc = boundary_coefficients(&sp);
        let u = 1e-5;
        assert!((potential_v(&sp, u).unwrap() * u * u / bc.origin - 1.0).abs() < 1e-6);
        let vb = potential_v(&sp, FRAC_PI_2 - u).unwrap();
        assert!((vb * u * u / bc.boundary - 1.0).abs() < 1e-6);
    }

    #[test]
    fn levels() {
        let sp = PotentialSpec::new(4, 0.5, 0).unwrap();
        assert_eq!(level_energies(&sp, 2), vec![0.25, 6.25, 20.25]);
    }

    #[test]
    fn transformed_modes_solve_schrodinger() {
        let m = ModeSpec::new(Family::Dirichlet, 5, 2.4, 1, 1, 1.0).unwrap();
        let sm = schrodinger_transform(&m).unwrap();
        for &r in &[0.2, 0.8, 1.4] {
            assert!(sm.residual(r).unwrap().relative() < 1e-12);
        }
        let n = schrodinger_transform(&ModeSpec::new(Family::Neumann, 4, 2.0, 0, 2, 1.0).unwrap()).unwrap();
        let (i1, i2) = (n.square_integral(1.57, 400).unwrap(), n.square_integral(1.5707, 400).unwrap());
        assert!((i1 - i2).abs() < 1e-6);
    }

    #[test]
    fn singleton_not_square_integrable() {
        let s = ModeSpec::fixed(Family::Singleton, 4, 0, 0, 1.0).unwrap();
        let sm = schrodinger_transform(&s).unwrap();
        let r = 0.9;
        assert!((sm.phi(r) - r.tan() * r.cos().sqrt() * sm.profile.coefficient).abs() < 1e-14);
        // ∫ sin²/cos grows like −ln(π/2 − r).
        let a = sm.square_integral(FRAC_PI_2 - 1e-3, 2000).unwrap();
        let b = sm.square_integral(FRAC_PI_2 - 1e-5, 2000).unwrap();
        assert!(b - a > 4.0 * sm.profile.coefficient.powi(2));
    }

    #[test]
    fn singleton_levels_lie_below() {
        let r = singleton_below_minimum(4, 0).unwrap();
        assert_eq!(r.energy, 0.25);
        assert!((r.minimum.value - 0.75).abs() < 1e-12);
        let r7 = singleton_below_minimum(7, 0).unwrap();
        assert_eq!(r7.energy, 4.0);
        assert!(r7.below);
        let all = singleton_level_grid(&[4, 5, 6, 7, 8], &[0, 1, 2, 3]).unwrap();
        assert!(all.iter().all(|r| r.below));
        assert!(singleton_below_minimum(3, 0).is_err());
    }
}
