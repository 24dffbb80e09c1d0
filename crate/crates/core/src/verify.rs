//! Property suites behind `cads verify`. Every suite returns cases with a
//! residual and a tolerance; tolerances are multiplied by `tol_scale`.

use crate::dipole::{
    negative_energy_probe_default, psi0_mode, psi2_series, q_squared, quartic_coeffs, scalar_mode,
    triplet_space, DipoleFamily, DipoleModeSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{ladder_apply_d4, FnField, LadderDirection, Point, DEFAULT_STEP};
use crate::jet::{Jet, Real};
use crate::modes::{
    apply_q, neumann_singleton_limit, radial_profile, residual_q, Family, ModeSpec,
};
use crate::products::{
    gram_matrix, kg_inner_at, max_deviation_from_identity, regularized_inner, singleton_norm_formula,
    singleton_norm_integral, SingletonSector,
};
use crate::propagators::{
    fit_branches, gb_decomposition, mode_sum, neumann_dirichlet_limit_check, ode_residual,
    ode_residual_squared, w2_residual, Kind, PropagatorKind, W2Variant,
};
use crate::quadrature::{trig_pair, QuadratureConfig};
use crate::report::{Case, Erratum, VerificationReport};
use crate::specfun::{
    digamma, gamma_fn, gauss_series, hyp2f1, jacobi_p, lerch_phi, pochhammer, SeriesConfig,
};
use crate::spectral::{
    level_energies, minimize_potential, potential_v, schrodinger_transform, singleton_below_minimum,
    PotentialSpec,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specfun,
    Modes,
    Products,
    Propagators,
    Dipole,
    Spectral,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 6] = [
        Suite::Specfun,
        Suite::Modes,
        Suite::Products,
        Suite::Propagators,
        Suite::Dipole,
        Suite::Spectral,
    ];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "specfun" => Suite::Specfun,
            "modes" => Suite::Modes,
            "products" => Suite::Products,
            "propagators" => Suite::Propagators,
            "dipole" => Suite::Dipole,
            "spectral" => Suite::Spectral,
            "all" => Suite::All,
            _ => return Err(Error::InvalidSpec(format!("unknown suite '{s}'"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Specfun => "specfun",
            Suite::Modes => "modes",
            Suite::Products => "products",
            Suite::Propagators => "propagators",
            Suite::Dipole => "dipole",
            Suite::Spectral => "spectral",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

pub fn run(suite: Suite, tol_scale: f64) -> Result<VerificationReport> {
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(Error::Domain(format!("tolerance scale must be positive, got {tol_scale}")));
    }
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::MODULES.to_vec(),
        s => vec![s],
    };
    let parts: Vec<(Vec<Case>, Vec<Erratum>)> =
        suites.par_iter().map(|&s| run_one(s, tol_scale)).collect();
    let mut cases = Vec::new();
    let mut errata = Vec::new();
    for (c, e) in parts {
        cases.extend(c);
        errata.extend(e);
    }
    Ok(VerificationReport::new(suite.to_string(), tol_scale, cases, errata))
}

fn run_one(s: Suite, ts: f64) -> (Vec<Case>, Vec<Erratum>) {
    match s {
        Suite::Specfun => (specfun_cases(ts), vec![]),
        Suite::Modes => {
            let mut c = mode_residual_cases(ts);
            c.extend(gram_cases(ts));
            c.extend(limit_mode_cases(ts));
            (c, modes_errata())
        }
        Suite::Products => (product_cases(ts), products_errata()),
        Suite::Propagators => {
            let mut c = mode_sum_cases(ts);
            c.extend(triplet_split_cases(ts, 2000));
            let (oc, oe) = propagator_ode_cases(ts);
            c.extend(oc);
            let (lc, le) = propagator_limit_cases(ts);
            c.extend(lc);
            let mut e = oe;
            e.extend(le);
            e.extend(propagator_static_errata());
            (c, e)
        }
        Suite::Dipole => {
            let (mut c, e) = fourth_order_cases(ts);
            c.extend(ladder_cases(ts));
            (c, e)
        }
        Suite::Spectral => (spectral_cases(ts), vec![]),
        Suite::All => unreachable!(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn guard(name: &str, tol: f64, f: impl FnOnce() -> Result<Case>) -> Case {
    f().unwrap_or_else(|e| Case::error(name, tol, e))
}

// ---------------------------------------------------------------- specfun

pub fn specfun_cases(ts: f64) -> Vec<Case> {
    let cfg = SeriesConfig::default();
    let mut rng = StdRng::seed_from_u64(0x5eed_2f1);
    let mut out = Vec::new();
    let tol = 1e-10 * ts;
    for i in 0..60 {
        let (a, b, c) = (rng.gen_range(-2.0..3.0), rng.gen_range(-2.0..3.0), rng.gen_range(0.2..4.0));
        let z: f64 = rng.gen_range(0.0..0.9);
        let name = format!("specfun.euler.{i:03}");
        out.push(guard(&name, tol, || {
            let lhs = hyp2f1(a, b, c, z, &cfg)?;
            let rhs = (1.0 - z).powf(c - a - b) * hyp2f1(c - a, c - b, c, z, &cfg)?;
            Ok(Case::check(&name, (lhs - rhs).abs() / lhs.abs().max(1.0), tol, format!("a={a:.4} b={b:.4} c={c:.4} z={z:.4}")))
        }));
    }
    for i in 0..40 {
        let (a, b) = (rng.gen_range(-1.5..2.0), rng.gen_range(-1.5..2.0));
        let mut c: f64 = rng.gen_range(0.3..4.0);
        if ((c - a - b) - (c - a - b).round()).abs() < 0.05 {
            c += 0.1;
        }
        let z: f64 = rng.gen_range(0.5..0.95);
        let name = format!("specfun.connection.{i:03}");
        let tol = 1e-10 * ts;
        out.push(guard(&name, tol, || {
            let series = gauss_series(a, b, c, z, &cfg)?;
            let routed = hyp2f1(a, b, c, z, &cfg)?;
            Ok(Case::check(&name, (series - routed).abs() / series.abs().max(1.0), tol, format!("a={a:.4} b={b:.4} c={c:.4} z={z:.4}")))
        }));
    }
    for i in 0..20 {
        let (a, b) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let m = rng.gen_range(0..3) as f64 * if i % 2 == 0 { 1.0 } else { -1.0 };
        let c = a + b + m;
        let c = if c <= 0.05 { c + 3.0 } else { c };
        let z: f64 = rng.gen_range(0.55..0.95);
        let name = format!("specfun.degenerate_continuity.{i:03}");
        let tol = 1e-4 * ts;
        out.push(guard(&name, tol, || {
            let at = hyp2f1(a, b, c, z, &cfg)?;
            let eps = 1e-6;
            let lim = 0.5 * (hyp2f1(a, b, c + eps, z, &cfg)? + hyp2f1(a, b, c - eps, z, &cfg)?);
            Ok(Case::check(&name, rel(at, lim), tol, format!("c-a-b={}", c - a - b)))
        }));
    }
    for i in 0..40 {
        let k = rng.gen_range(0..12u32);
        let (al, be) = (rng.gen_range(-0.9..4.0), rng.gen_range(-0.9..4.0));
        let x: f64 = rng.gen_range(-1.0..1.0);
        let lhs = jacobi_p(k, al, be, -x);
        let rhs = if k % 2 == 0 { 1.0 } else { -1.0 } * jacobi_p(k, be, al, x);
        let name = format!("specfun.jacobi_symmetry.{i:03}");
        out.push(Case::check(&name, (lhs - rhs).abs() / lhs.abs().max(1.0), 1e-12 * ts, format!("k={k}")));
    }
    for i in 0..40 {
        let a: f64 = rng.gen_range(0.1..10.0);
        let n = rng.gen_range(0..15u32);
        let name = format!("specfun.pochhammer_gamma.{i:03}");
        let tol = 1e-11 * ts;
        out.push(guard(&name, tol, || {
            let v = pochhammer(a, n) * gamma_fn(a)?;
            Ok(Case::check(&name, rel(v, gamma_fn(a + n as f64)?), tol, format!("a={a:.4} n={n}")))
        }));
    }
    let ex: [(&str, Box<dyn Fn() -> Result<f64>>, f64); 6] = [
        ("specfun.example.gamma_half", Box::new(|| gamma_fn(0.5)), PI.sqrt()),
        ("specfun.example.digamma_one", Box::new(|| digamma(1.0)), -0.577_215_664_901_532_9),
        ("specfun.example.hyp_log", Box::new(move || hyp2f1(1.0, 1.0, 2.0, 0.5, &cfg)), 2.0 * 2f64.ln()),
        ("specfun.example.hyp_quarter", Box::new(move || hyp2f1(0.25, 0.75, 1.0, 0.25, &cfg)), 1.054_648_614_831_467),
        ("specfun.example.lerch_log", Box::new(move || lerch_phi(0.5, 1.0, 1.0, &cfg)), 2.0 * 2f64.ln()),
        ("specfun.example.pochhammer", Box::new(|| Ok(pochhammer(0.25, 2))), 0.3125),
    ];
    for (name, f, want) in ex {
        out.push(guard(name, 1e-12 * ts, || Ok(Case::check(name, rel(f()?, want), 1e-12 * ts, ""))));
    }
    out
}

// ------------------------------------------------------------------ modes

fn e0_samples(family: Family, d: u32) -> Vec<f64> {
    let d = d as f64;
    let lo = 0.5 * (d - 3.0);
    match family {
        Family::Dirichlet => vec![lo + 0.3, 0.5 * (d - 1.0) + 0.1, 0.5 * (d + 1.0) - 0.2],
        Family::Neumann => vec![lo + 0.3, 0.5 * (d - 1.0) + 0.1, 0.5 * (d + 1.0) - 0.2, 0.5 * (d + 1.0) + 0.25, d, d + 1.7],
        _ => vec![],
    }
}

const GRID_POINTS: usize = 64;

fn radial_grid() -> Vec<f64> {
    (0..GRID_POINTS).map(|i| (i as f64 + 0.5) * FRAC_PI_2 / GRID_POINTS as f64).collect()
}

/// Every (spec-group) in the residual and Gram grids.
fn residual_groups() -> Vec<(String, Vec<ModeSpec>)> {
    let mut groups = Vec::new();
    for d in [3u32, 4, 5, 7] {
        for fam in [Family::Dirichlet, Family::Neumann] {
            for e0 in e0_samples(fam, d) {
                let specs = (0..=3)
                    .flat_map(|l| (0..=4).map(move |k| ModeSpec::new(fam, d, e0, l, k, 1.0)))
                    .filter_map(|s| s.ok())
                    .collect();
                groups.push((format!("{fam}.d{d}.e0_{e0:.2}"), specs));
            }
        }
        for fam in [Family::MasslessHigh, Family::MasslessLow, Family::Gauge] {
            let specs = (0..=3)
                .flat_map(|l| (0..=4).map(move |k| ModeSpec::fixed(fam, d, l, k, 1.0)))
                .filter_map(|s| s.ok())
                .collect();
            groups.push((format!("{fam}.d{d}"), specs));
        }
        let specs = (0..=3).filter_map(|l| ModeSpec::fixed(Family::Singleton, d, l, 0, 1.0).ok()).collect();
        groups.push((format!("singleton.d{d}"), specs));
        for m in [0i32, 1] {
            let specs = (0..=3)
                .flat_map(|l| (0..=4).map(move |k| ModeSpec::degenerate(d, m, l, k, 1.0)))
                .filter_map(|s| s.ok())
                .collect();
            groups.push((format!("degenerate.d{d}.m{m}"), specs));
        }
    }
    groups
}

pub fn mode_residual_cases(ts: f64) -> Vec<Case> {
    let grid = radial_grid();
    let tol = 1e-9 * ts;
    residual_groups()
        .par_iter()
        .map(|(name, specs)| {
            let name = format!("modes.residual.{name}");
            guard(&name, tol, || {
                if specs.is_empty() {
                    return Err(Error::InvalidSpec("empty spec group".into()));
                }
                let mut worst = 0.0f64;
                for s in specs {
                    for &r in &grid {
                        worst = worst.max(residual_q(s, r)?.relative());
                    }
                }
                Ok(Case::check(&name, worst, tol, format!("{} modes x {GRID_POINTS} radii", specs.len())))
            })
        })
        .collect()
}

pub fn gram_cases(ts: f64) -> Vec<Case> {
    let q = QuadratureConfig::default();
    let tol = 1e-7 * ts;
    let mut jobs: Vec<(String, Family, u32, f64, u32)> = Vec::new();
    for d in [3u32, 4, 5, 7] {
        for fam in [Family::Dirichlet, Family::Neumann] {
            for e0 in e0_samples(fam, d) {
                for l in 0..=3 {
                    jobs.push((format!("modes.gram.{fam}.d{d}.e0_{e0:.2}.l{l}"), fam, d, e0, l));
                }
            }
        }
    }
    for (fam, e0s) in [
        (Family::DD2, [0.2, 0.9, 1.3]),
        (Family::DN2, [-0.2, 0.7, 2.5]),
        (Family::ND2, [0.1, 0.5, 0.9]),
        (Family::NN2, [0.3, 0.7, 2.2]),
    ] {
        for e0 in e0s {
            jobs.push((format!("modes.gram.{fam}.e0_{e0:.2}"), fam, 2, e0, 0));
        }
    }
    jobs.par_iter()
        .map(|(name, fam, d, e0, l)| {
            guard(name, tol, || {
                let g = gram_matrix(*fam, *d, *e0, *l, 4, 1.0, &q)?;
                Ok(Case::check(name, max_deviation_from_identity(&g), tol, "kmax = 4"))
            })
        })
        .collect()
}

pub fn limit_mode_cases(ts: f64) -> Vec<Case> {
    let grid = radial_grid();
    let tol = 1e-8 * ts;
    let mut out = Vec::new();
    for d in [3u32, 4, 5, 7] {
        for l in 0..=2 {
            let name = format!("modes.singleton_limit.d{d}.l{l}");
            out.push(guard(&name, tol, || {
                let mut worst = 0.0f64;
                for k in 0..=4 {
                    let lim = neumann_singleton_limit(d, l, k, 1.0)?;
                    let target = if k > 0 {
                        radial_profile(&ModeSpec::fixed(Family::Gauge, d, l, k - 1, 1.0)?)?
                    } else if d == 3 && l == 0 {
                        radial_profile(&ModeSpec::fixed(Family::Singleton, d, l, 0, 1.0)?)?
                    } else {
                        crate::modes::RadialProfile::zero()
                    };
                    for &r in &grid {
                        worst = worst.max((lim.eval(r) - target.eval(r)).abs());
                    }
                }
                Ok(Case::check(&name, worst, tol, "Neumann k -> {0, gauge k-1}"))
            }));
            let name = format!("modes.singleton_limit_eps.d{d}.l{l}");
            let tol_eps = 1e-4 * ts;
            out.push(guard(&name, tol_eps, || {
                let eps = 1e-6;
                let mut worst = 0.0f64;
                for k in 1..=4 {
                    let lim = neumann_singleton_limit(d, l, k, 1.0)?;
                    let n = radial_profile(&ModeSpec::new(Family::Neumann, d, 0.5 * (d as f64 - 3.0) + eps, l, k, 1.0)?)?;
                    for &r in &grid {
                        worst = worst.max((n.eval(r) - lim.eval(r)).abs());
                    }
                }
                Ok(Case::check(&name, worst, tol_eps, "E0 = (d-3)/2 + 1e-6, O(eps) gap"))
            }));
        }
    }
    out
}

fn modes_errata() -> Vec<Erratum> {
    let e = |l: &str, p: &str, r: &str, ev: &str| Erratum {
        equation_label: l.into(),
        as_printed: p.into(),
        resolved_form: r.into(),
        evidence: ev.into(),
    };
    vec![
        e(
            "2D NN2 normalization",
            "as printed",
            "confirmed as printed",
            "Gram matrices of NN2 at E0 in {0.3, 0.7, 2.2}, kmax = 4, equal the identity within 1e-7",
        ),
        e(
            "2D DD2 normalization",
            "Gamma(k - E0 + 1/2) in the denominator",
            "Gamma(k - E0 + 3/2)",
            "unit KG norm by quadrature only with the shifted argument",
        ),
        e(
            "massless mode normalization",
            "(l + d/2 + 1)_{k+1} in A^2 and B^2",
            "A^2 = a^{d-2} Gamma(k+3/2) k! / (pi (lam)_{k+1} (lam)_{k+1/2}), B^2 = a^{d-2} Gamma(k+1/2) k! / (pi (lam)_k (lam)_{k+1/2}), lam = l + d/2 - 1",
            "unit KG norms by quadrature to 1e-10",
        ),
        e(
            "second boundary branch parameters",
            "(l + E0 + omega + d - 1)/2",
            "(l - E0 + omega + d - 1)/2",
            "connection check at d=4, E0=2.3, omega=0.77, r=1.4 agrees to 1e-10",
        ),
        e(
            "degenerate-mode normalization power of a",
            "a^{(2-d)/2}",
            "a^{(d-2)/2}",
            "unit KG norm; agrees with the Dirichlet/Neumann constants at E0 = (d-1)/2",
        ),
        e(
            "2D DN2 normalization",
            "Gamma(k + E0 + !)",
            "Gamma(k + E0 + 1)",
            "Gram matrices of DN2 equal the identity within 1e-7",
        ),
        e(
            "Neumann to singleton limit at k = 0",
            "the k = 0 profile vanishes",
            "vanishes except at d = 3, l = 0, where the limit is the singleton a^{(d-2)/2}",
            "alpha = l + (d-3)/2 = 0 removes the vanishing prefactor; limit grid agrees within 1e-8",
        ),
    ]
}

// --------------------------------------------------------------- products

pub fn product_cases(ts: f64) -> Vec<Case> {
    let q = QuadratureConfig::default();
    let eps = [1e-2, 1e-3, 1e-4];
    let mut out = Vec::new();
    for d in [4u32, 5, 7] {
        for l in 0..=2 {
            let name = format!("products.singleton_norm.d{d}.l{l}");
            let tol = 1e-3 * ts;
            out.push(guard(&name, tol, || {
                let s = SingletonSector::Singleton { l };
                let r = regularized_inner(d, 1.0, s, s, &eps, &q)?;
                let want = singleton_norm_formula(d, l, 1.0);
                Ok(Case::check(&name, rel(r.value, want), tol, format!("value {:.10} vs {want}", r.value)))
            }));
            for k in 0..=3 {
                let name = format!("products.gauge_norm.d{d}.l{l}.k{k}");
                let tol = 1e-6 * ts;
                out.push(guard(&name, tol, || {
                    let g = SingletonSector::Gauge { l, k };
                    let r = regularized_inner(d, 1.0, g, g, &eps, &q)?;
                    Ok(Case::check(&name, r.value.abs(), tol, "regularized gauge norm"))
                }));
            }
            let name = format!("products.singleton_gauge.d{d}.l{l}");
            let tol = 1e-6 * ts;
            out.push(guard(&name, tol, || {
                let r = regularized_inner(d, 1.0, SingletonSector::Singleton { l }, SingletonSector::Gauge { l, k: 0 }, &eps, &q)?;
                Ok(Case::check(&name, r.value.abs(), tol, "regularized cross product"))
            }));
        }
        let name = format!("products.divergence_slope.d{d}");
        let tol = 0.02 * ts;
        out.push(guard(&name, tol, || {
            let (e1, e2) = (1e-3, 1e-4);
            let i1 = singleton_norm_integral(d, 1, 1.0, e1, &q)?;
            let i2 = singleton_norm_integral(d, 1, 1.0, e2, &q)?;
            let slope = (i2.ln() - i1.ln()) / (e2.ln() - e1.ln());
            Ok(Case::check(&name, (slope + 1.0).abs(), tol, format!("log-slope {slope:.5}")))
        }));
    }
    let name = "products.hermiticity";
    out.push(guard(name, 1e-15 * ts, || {
        let mut worst = 0.0f64;
        let pairs = [
            (ModeSpec::new(Family::Neumann, 5, 2.5, 1, 0, 1.0)?, ModeSpec::new(Family::Dirichlet, 5, 2.5, 1, 1, 1.0)?),
            (ModeSpec::new(Family::Dirichlet, 4, 1.2, 2, 3, 1.0)?, ModeSpec::fixed(Family::Gauge, 4, 2, 1, 1.0)?),
        ];
        for (a, b) in &pairs {
            for t in [0.0, 0.4, 2.0] {
                let (ab, ba) = (kg_inner_at(a, b, t, &q)?, kg_inner_at(b, a, t, &q)?);
                worst = worst.max((ab - ba.conj()).norm());
            }
        }
        Ok(Case::check(name, worst, 1e-15 * ts, "(F1,F2) = conj (F2,F1)"))
    }));
    out
}

fn products_errata() -> Vec<Erratum> {
    vec![Erratum {
        equation_label: "singleton norm power of a".into(),
        as_printed: "a^{d-2} (l + (d-3)/2)".into(),
        resolved_form: "a^{2-d} (l + (d-3)/2) for unit-coefficient singleton modes".into(),
        evidence: "eps * KG integral of sin^l cos^{(d-3)/2+eps} tends to omega a^{2-d}; identical at a = 1, where the stated values 1/2 and 3 are reproduced".into(),
    }]
}

// ------------------------------------------------------------ propagators

/// (d, E0, family, r, t) for the mode-sum oracle.
pub fn mode_sum_grid() -> Vec<(u32, f64, Family, f64, f64)> {
    let mut g = Vec::new();
    for &(d, e0, fam) in &[(4u32, 2.0, Family::Dirichlet), (5, 3.0, Family::Neumann), (3, 0.7, Family::Dirichlet)] {
        for &(r, t) in &[(0.5, 0.3), (0.9, 0.2), (1.2, 0.6)] {
            g.push((d, e0, fam, r, t));
        }
    }
    g
}

pub fn mode_sum_cases(ts: f64) -> Vec<Case> {
    let tol = 1e-6 * ts;
    mode_sum_grid()
        .par_iter()
        .map(|&(d, e0, fam, r, t)| {
            let name = format!("propagators.mode_sum.{fam}.d{d}.e0_{e0:.2}.r{r:.2}.t{t:.2}");
            guard(&name, tol, || {
                let x = Point::new(t, r, vec![0.0; d as usize - 2]);
                let ms = mode_sum(d, e0, fam, &x, 500, 1.0)?;
                let kind = if fam == Family::Dirichlet { Kind::DirichletClosed } else { Kind::NeumannClosed };
                let z = t.cos() / r.cos();
                let cf = PropagatorKind::new(kind, d, e0, 1.0)?.closed_form(z)?;
                Ok(Case::check(&name, rel(ms.re(), cf), tol, format!("Z = {z:.6}, 500 terms, tail {:.1e}", ms.tail_estimate)))
            })
        })
        .collect()
}

pub fn triplet_points() -> [(f64, f64); 5] {
    [(0.4, 0.2), (0.9, 0.5), (0.3, 0.0), (1.2, 0.3), (0.7, 0.35)]
}

pub fn triplet_split_cases(ts: f64, nterms: usize) -> Vec<Case> {
    let tol = 1e-8 * ts;
    let jobs: Vec<(u32, f64, f64)> =
        [4u32, 5, 7].iter().flat_map(|&d| triplet_points().map(|(r, t)| (d, r, t))).collect();
    jobs.par_iter()
        .map(|&(d, r, t)| {
            let name = format!("propagators.triplet_split.d{d}.r{r:.2}.t{t:.2}");
            guard(&name, tol, || {
                let g = gb_decomposition(d, r, t, nterms)?;
                let cf = PropagatorKind::new(Kind::FlatoFronsdal, d, 0.0, 1.0)?.closed_form(t.cos() / r.cos())?;
                let res = (g.total - Complex64::new(cf, 0.0)).norm() / cf.abs();
                Ok(Case::check(&name, res, tol, format!("{nterms} terms")))
            })
        })
        .collect()
}

pub fn propagator_ode_cases(ts: f64) -> (Vec<Case>, Vec<Erratum>) {
    let mut out = Vec::new();
    let zs = [1.2, 1.7, 2.5, 5.0, 10.0];
    let kinds: Vec<(Kind, u32, f64)> = vec![
        (Kind::DirichletClosed, 4, 2.0),
        (Kind::DirichletClosed, 7, 3.3),
        (Kind::NeumannClosed, 5, 3.0),
        (Kind::NeumannClosed, 4, 0.9),
        (Kind::SingletonLimit, 5, 0.0),
        (Kind::W1, 4, 0.0),
        (Kind::W2, 4, 0.0),
        (Kind::W2, 5, 0.0),
        (Kind::W2, 7, 0.0),
        (Kind::GeneralZ { c1: 0.3, c2: -1.2 }, 6, 2.2),
    ];
    let tol = 1e-7 * ts;
    for (kind, d, e0) in kinds {
        let name = format!("propagators.ode.{kind}.d{d}");
        out.push(guard(&name, tol, || {
            let p = PropagatorKind::new(kind, d, e0, 1.0)?;
            let mut worst = 0.0f64;
            for &z in &zs {
                worst = worst.max(ode_residual(&p, z, None)?.relative());
            }
            Ok(Case::check(&name, worst, tol, "z in [1.2, 10], exact derivatives"))
        }));
    }
    let name = "propagators.ode.dirichlet_fd";
    out.push(guard(name, tol, || {
        let p = PropagatorKind::new(Kind::DirichletClosed, 4, 2.0, 1.0)?;
        Ok(Case::check(name, ode_residual(&p, 2.5, Some(1e-3))?.relative(), tol, "z = 2.5, FD step 1e-3"))
    }));
    let name = "propagators.ode.w2_fd";
    let tol6 = 1e-6 * ts;
    out.push(guard(name, tol6, || {
        let p = PropagatorKind::new(Kind::W2, 4, 0.0, 1.0)?;
        Ok(Case::check(name, ode_residual(&p, 2.0, Some(1e-3))?.relative(), tol6, "z = 2, FD step 1e-3"))
    }));
    let printed = w2_residual(4, 2.0, W2Variant::Printed).map_or(f64::NAN, |r| r.relative());
    let corrected = w2_residual(4, 2.0, W2Variant::Corrected).map_or(f64::NAN, |r| r.relative());
    for d in [4u32, 5, 7] {
        let name = format!("propagators.ff_squared.d{d}");
        out.push(guard(&name, tol6, || {
            let p = PropagatorKind::new(Kind::FlatoFronsdal, d, 0.0, 1.0)?;
            let mut worst = 0.0f64;
            let mut second = f64::INFINITY;
            for &z in &zs {
                worst = worst.max(ode_residual_squared(&p, z)?.relative());
                second = second.min(ode_residual(&p, z, None)?.relative());
            }
            Ok(Case::check(&name, worst, tol6, format!("second-order residual stays >= {second:.3e}")))
        }));
        let name = format!("propagators.ff_not_second_order.d{d}");
        out.push(guard(&name, 1.0, || {
            let p = PropagatorKind::new(Kind::FlatoFronsdal, d, 0.0, 1.0)?;
            let second = zs
                .iter()
                .map(|&z| ode_residual(&p, z, None).map(|r| r.relative()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok(Case::check(&name, 1e-3 / second, 1.0, "residual = 1e-3 / (smallest second-order relative residual)"))
        }));
    }
    let errata = vec![Erratum {
        equation_label: "logarithmic solution w2".into(),
        as_printed: "psi(A) + psi(B) - psi(A) - psi(B) + psi(2) - psi(2+n) + psi(1) - psi(n+1), A = (d+1)/4, B = (d+3)/4".into(),
        resolved_form: "psi(A+n) + psi(B+n) - psi(A) - psi(B) + psi(2) - psi(2+n) + psi(1) - psi(n+1); constant term 16/((d-1)(d-3)) Z^{-(d-3)/2} confirmed; undefined at d = 3".into(),
        evidence: format!("relative ODE residual at d=4, z=2: printed {printed:.3e}, resolved {corrected:.3e}"),
    }];
    (out, errata)
}

pub fn propagator_limit_cases(ts: f64) -> (Vec<Case>, Vec<Erratum>) {
    let mut out = Vec::new();
    let mut evidence = String::new();
    for d in [4u32, 5, 7] {
        let base = format!("propagators.singleton_limit.d{d}");
        match neumann_dirichlet_limit_check(d, 2.0, &[1e-2, 1e-3, 1e-4], 500) {
            Ok(rep) => {
                out.push(Case::check(format!("{base}.shape"), rep.shape_spread, 1e-8 * ts, "SingletonLimit / w1 over z grid"));
                out.push(Case::check(
                    format!("{base}.monotone"),
                    if rep.monotone { 0.0 } else { 1.0 },
                    0.0,
                    "relative gap decreases along the eps sequence",
                ));
                out.push(Case::check(
                    format!("{base}.constant_stability"),
                    rep.constant_spread,
                    5e-5 * ts,
                    format!("fitted constant {:.8e}; 4 significant digits need < 5e-5", rep.direct_constant),
                ));
                out.push(Case::check(
                    format!("{base}.constant_vs_limit"),
                    rel(rep.direct_constant, rep.printed_constant),
                    1e-6 * ts,
                    "gauge mode sum / w1 against a^{d-2} Gamma((d+1)/2) / (4 (2 pi)^{(d-1)/2})",
                ));
                if d == 4 {
                    let gap = rep.samples[2].relative_gap;
                    out.push(Case::advisory(
                        "propagators.singleton_limit.d4.gap_eps_1e-4",
                        gap,
                        1e-3,
                        "listed bound 1e-3; the gap is first order in eps (about 14.3 eps)",
                    ));
                    evidence = format!(
                        "d=4, z=2: gauge-mode sum / w1 = {:.12e}; corrected constant {:.12e}; linear eps-extrapolations {:?}",
                        rep.direct_constant, rep.printed_constant, rep.extrapolated_constants
                    );
                }
            }
            Err(e) => out.push(Case::error(base, 1e-8 * ts, e)),
        }
    }
    for &(kind, d, e0) in &[(Kind::DirichletClosed, 5u32, 2.3), (Kind::NeumannClosed, 5, 2.3), (Kind::NeumannClosed, 7, 4.6)] {
        let name = format!("propagators.branch_fit.{kind}.d{d}");
        let tol = 1e-8 * ts;
        out.push(guard(&name, tol, || {
            let p = PropagatorKind::new(kind, d, e0, 1.0)?;
            let zs: Vec<f64> = (0..12).map(|i| 1.2 + 0.7 * i as f64).collect();
            let f = fit_branches(&p, &zs)?;
            let n = p.normalization()?;
            let (want1, want2) = if kind == Kind::DirichletClosed { (n, 0.0) } else { (0.0, n) };
            let err = f.residual.max((f.c1 - want1).abs() / n).max((f.c2 - want2).abs() / n);
            Ok(Case::check(&name, err, tol, format!("c1 = {:.10e}, c2 = {:.10e}", f.c1, f.c2)))
        }));
    }
    let errata = vec![Erratum {
        equation_label: "singleton-limit propagator prefactor".into(),
        as_printed: "a^{d-2} Gamma((d+1)/2) / (2 pi)^{4 (d-1)/2}".into(),
        resolved_form: "a^{d-2} Gamma((d+1)/2) / (4 (2 pi)^{(d-1)/2})".into(),
        evidence,
    }];
    (out, errata)
}

fn propagator_static_errata() -> Vec<Erratum> {
    vec![
        Erratum {
            equation_label: "triplet split of the dipole two-point function".into(),
            as_printed: "scalar series coefficient ((d-3)/2)_{n+1} / (n! (n+1)^2)".into(),
            resolved_form: "((d-3)/2)_{n+1} / (n! (n+1)); the gauge coefficient alpha (alpha)_{n+1} / (n! (n+1)^2) is unchanged".into(),
            evidence: "follows from the Jacobi lowering identity; the corrected split matches the closed form below 1e-8 at 15 points".into(),
        },
        Erratum {
            equation_label: "Neumann mode-sum example point".into(),
            as_printed: "d=5, E0=3, r=0.4, t=0.5".into(),
            resolved_form: "r=0.5, t=0.3".into(),
            evidence: "the printed point has Z = cos 0.5 / cos 0.4 = 0.953 < 1, outside the spacelike domain".into(),
        },
    ]
}

// ----------------------------------------------------------------- dipole

pub fn fourth_order_cases(ts: f64) -> (Vec<Case>, Vec<Erratum>) {
    let mut out = Vec::new();
    let rs = [0.1, 0.35, 0.7, 1.0, 1.3, 1.5];
    let tol = 1e-8 * ts;
    for d in [4u32, 5, 7] {
        for l in 0..=2 {
            let name = format!("dipole.quartic_residual.d{d}.l{l}");
            out.push(guard(&name, tol, || {
                let mut members = triplet_space(d, l, 3, 1.0)?;
                members.push(DipoleModeSpec::new(DipoleFamily::PsiZero, d, l, 0, 1.0)?);
                let mut worst = 0.0f64;
                for m in &members {
                    for &r in &rs {
                        worst = worst.max(m.quartic_residual(r)?.relative());
                    }
                }
                Ok(Case::check(&name, worst, tol, format!("{} members", members.len())))
            }));
        }
    }
    let tol6 = 1e-6 * ts;
    for &(d, e0, l, w) in &[(4u32, 0.5, 0u32, 1.3), (5, 1.3, 1, 2.7), (7, 2.1, 2, 0.9)] {
        let name = format!("dipole.psi2_source_ratio.d{d}.l{l}");
        out.push(guard(&name, tol6, || {
            let p = psi2_series(d, e0, l, w, 600)?;
            let lam = e0 * (e0 - d as f64 + 1.0);
            let mut ratios = Vec::new();
            for r in [0.2, 0.5, 0.8, 1.0] {
                let (s, c) = trig_pair(r);
                let (sj, cj) = Jet::trig_pair(s, c);
                let q = apply_q(d, l, lam, w, r, |s, c| p.eval_sc(s, c).unwrap_or(Jet::constant(f64::NAN)));
                let psi1: Jet = p.psi1_sc(sj, cj)?;
                ratios.push(c * c * q.value / psi1.value());
            }
            let spread = ratios.iter().map(|x| rel(*x, ratios[0])).fold(0.0, f64::max);
            Ok(Case::check(&name, spread, tol6, format!("cos^2 Q psi2 / psi1 = {:.10}", ratios[0])))
        }));
    }
    let mut worst_q = 0.0f64;
    let name = "dipole.quartic_coefficients";
    out.push(guard(name, tol6, || {
        for &(d, e0, l, w) in &[(4u32, 0.5, 0u32, 1.3), (5, 1.7, 2, 0.4), (3, 0.2, 1, 2.2), (7, 2.0, 3, 3.5)] {
            let lam = e0 * (e0 - d as f64 + 1.0);
            let f = |s: Jet, c: Jet| s.powf(1.3) * c.powf(0.8) * (s * c + 2.0).ln();
            for r in [0.2, 0.7, 1.3] {
                let qc = quartic_coeffs(d, lam, 1.0, w, l, r);
                let (s, c) = trig_pair(r);
                let (sj, cj) = Jet::trig_pair(s, c);
                let res = qc.apply(&f(sj, cj));
                let comp = q_squared(d, l, lam, w, r, f);
                worst_q = worst_q.max((res.value - comp).abs() / res.scale);
            }
        }
        Ok(Case::check(name, worst_q, tol6, "printed coefficient block against Q composed twice"))
    }));
    let errata = vec![Erratum {
        equation_label: "quartic coefficient block".into(),
        as_printed: "Q^2 f with coefficients a4..a0".into(),
        resolved_form: "the block equals cos^2 r Q(cos^2 r Q f), with lambda read as lambda/a^2; coefficients confirmed".into(),
        evidence: format!("largest relative deviation from the composition: {worst_q:.3e}"),
    }];
    let mut errata = errata;
    let e = |l: &str, p: &str, r: &str, ev: &str| Erratum {
        equation_label: l.into(),
        as_printed: p.into(),
        resolved_form: r.into(),
        evidence: ev.into(),
    };
    errata.extend([
        e(
            "dipole source relation",
            "Q psi2 = c psi1",
            "cos^2 r Q psi2 = c psi1 with c = 2(2l + d - 1)",
            "cos^2 Q psi2 / psi1 is constant within 1e-6 at four radii",
        ),
        e(
            "Psi0 Lerch representation",
            "Phi(sin^2 r, 1, A) without prefactor",
            "A Phi(sin^2 r, 1, A), A = l + (d-1)/2",
            "the series then matches the closed logarithmic forms within 1e-9",
        ),
        e(
            "Psi0 finite-sum closed form",
            "(2N-1) s^{1-2N} [atanh s + sum_{k<N} s^{2k-1}/(2k-1)]",
            "(2N-1) s^{1-2N} [atanh s - sum_{k<N} s^{2k-1}/(2k-1)]",
            "closed form against the Lerch series within 1e-9",
        ),
        e(
            "d = 4 singleton ladder angular factor",
            "sin theta",
            "cos theta, the l = 1 zonal harmonic along axis 3",
            "M3+ Psi0_0 = (3i/5) Psi0_1 - 2i F1 holds to finite-difference accuracy only with cos theta",
        ),
    ]);
    (out, errata)
}

pub fn ladder_cases(ts: f64) -> Vec<Case> {
    let mut out = Vec::new();
    let tol = 1e-5 * ts;
    let name = "dipole.ladder.scalar_to_singleton";
    out.push(guard(name, tol, || {
        let (prof, w) = scalar_mode(4, 0, 0)?;
        let prof = prof.unnormalized();
        let sing = radial_profile(&ModeSpec::fixed(Family::Singleton, 4, 1, 0, 1.0)?)?.unnormalized();
        let ws = crate::modes::frequency(&ModeSpec::fixed(Family::Singleton, 4, 1, 0, 1.0)?)?;
        let f = FnField::new(move |p: &Point| Complex64::from_polar(prof.eval(p.r), -w * p.t));
        let mut worst = 0.0f64;
        for &(t, r, th) in &[(0.0, 0.3, 0.5), (0.4, 0.6, 0.8), (1.1, 0.9, 1.3), (2.0, 1.2, 2.1), (0.7, 1.4, 2.8)] {
            let p = Point::new(t, r, vec![th, 0.4]);
            let v = ladder_apply_d4(&f, &p, LadderDirection::Lower, 3, DEFAULT_STEP)?;
            let want = 2.0 * Complex64::i() * Complex64::from_polar(sing.eval(r) * th.cos(), -ws * t);
            worst = worst.max((v - want).norm());
        }
        Ok(Case::check(name, worst, tol, "M3- scalar(k=0) = 2i singleton(l=1), 5 points"))
    }));
    let name = "dipole.ladder.singleton_ground_annihilated";
    out.push(guard(name, tol, || {
        let f = FnField::new(|p: &Point| Complex64::from_polar(p.r.cos().sqrt(), -0.5 * p.t));
        let mut worst = 0.0f64;
        for &(t, r, th) in &[(0.1, 0.3, 0.5), (0.9, 0.8, 1.7), (2.0, 1.3, 2.5)] {
            for axis in 1..=3 {
                let v = ladder_apply_d4(&f, &Point::new(t, r, vec![th, 1.0]), LadderDirection::Lower, axis, DEFAULT_STEP)?;
                worst = worst.max(v.norm());
            }
        }
        Ok(Case::check(name, worst, tol, "all three axes"))
    }));
    let name = "dipole.ladder.negative_energy_component";
    out.push(guard(name, 1.0, || {
        let rep = negative_energy_probe_default()?;
        Ok(Case::check(
            name,
            10.0 * rep.noise_floor / rep.negative_min,
            1.0,
            format!("e^(+it/2) min {:.3e} vs noise {:.3e}", rep.negative_min, rep.noise_floor),
        ))
    }));
    let name = "dipole.ladder.raise_psi0";
    out.push(guard(name, tol, || {
        let rep = negative_energy_probe_default()?;
        Ok(Case::check(name, rep.raise_residual_max, tol, "M3+ Psi0_0 = (3i/5) Psi0_1 - 2i F1"))
    }));
    let name = "dipole.psi0_closed_vs_series";
    out.push(guard(name, 1e-9 * ts, || {
        let mut worst = 0.0f64;
        for &(d, l) in &[(4u32, 0u32), (5, 1), (6, 2), (7, 0)] {
            let m = psi0_mode(d, l)?;
            for r in [0.3, 0.8, 1.3] {
                worst = worst.max(rel(m.eval_closed(r), m.eval(r)));
            }
        }
        Ok(Case::check(name, worst, 1e-9 * ts, "closed logarithmic forms against the Lerch series"))
    }));
    out
}

// --------------------------------------------------------------- spectral

pub fn spectral_cases(ts: f64) -> Vec<Case> {
    let mut out = Vec::new();
    for d in 4..=8u32 {
        for l in 0..=3 {
            let name = format!("spectral.singleton_below_min.d{d}.l{l}");
            out.push(guard(&name, 0.0, || {
                let r = singleton_below_minimum(d, l)?;
                Ok(Case::check(
                    &name,
                    if r.below { 0.0 } else { r.energy - r.minimum.value },
                    0.0,
                    format!("E = {} < inf V = {:.10} ({:?})", r.energy, r.minimum.value, r.minimum.location),
                ))
            }));
            if l == 0 {
                let name = format!("spectral.gauge_level_above_min.d{d}");
                out.push(guard(&name, 0.0, || {
                    let r = singleton_below_minimum(d, 0)?;
                    Ok(Case::advisory(
                        &name,
                        (r.minimum.value - r.gauge_energy).max(0.0),
                        0.0,
                        format!("k=1 level {} vs inf V {:.6}", r.gauge_energy, r.minimum.value),
                    ))
                }));
            }
        }
    }
    let name = "spectral.d4_l0_closed_form";
    out.push(guard(name, 1e-12 * ts, || {
        let sp = PotentialSpec::new(4, 0.5, 0)?;
        let m = minimize_potential(&sp)?;
        let mut worst = (m.value - 0.75).abs().max((level_energies(&sp, 0)[0] - 0.25).abs());
        for r in [0.1, 0.6, 1.2, 1.5] {
            worst = worst.max(rel(potential_v(&sp, r)?, 0.75 / r.cos().powi(2)));
        }
        Ok(Case::check(name, worst, 1e-12 * ts, "V = 0.75 / cos^2 r, E = 0.25, inf V = 0.75"))
    }));
    let tol = 1e-9 * ts;
    for d in 3..=7u32 {
        let name = format!("spectral.schrodinger_residual.d{d}");
        out.push(guard(&name, tol, || {
            let mut specs = vec![
                ModeSpec::new(Family::Dirichlet, d, 0.5 * (d as f64 - 1.0) + 0.2, 1, 1, 1.0)?,
                ModeSpec::new(Family::Neumann, d, d as f64 + 0.4, 2, 2, 1.0)?,
                ModeSpec::fixed(Family::Gauge, d, 0, 3, 1.0)?,
                ModeSpec::fixed(Family::MasslessHigh, d, 1, 1, 1.0)?,
                ModeSpec::degenerate(d, 1, 0, 2, 1.0)?,
            ];
            if let Ok(s) = ModeSpec::fixed(Family::MasslessLow, d, 2, 0, 1.0) {
                specs.push(s);
            }
            let mut worst = 0.0f64;
            for s in &specs {
                let sm = schrodinger_transform(s)?;
                for r in [0.15, 0.5, 0.9, 1.3, 1.5] {
                    worst = worst.max(sm.residual(r)?.relative());
                }
            }
            Ok(Case::check(&name, worst, tol, "-phi'' + V phi = omega^2 phi"))
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::MODULES.iter().chain([Suite::All].iter()) {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert!(run(Suite::Specfun, 0.0).is_err());
    }

    #[test]
    fn specfun_suite_passes() {
        let r = run(Suite::Specfun, 1.0).unwrap();
        assert!(r.cases.len() >= 200);
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn spectral_suite_passes() {
        let r = run(Suite::Spectral, 1.0).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
