use cads_core::geometry::{embed, invariant_z, Point};
use cads_core::modes::{radial_profile, Family, ModeSpec};
use cads_core::products::kg_inner_at;
use cads_core::propagators::{Kind, PropagatorKind};
use cads_core::quadrature::QuadratureConfig;
use cads_core::report::{Case, VerificationReport};
use cads_core::specfun::{hyp2f1, jacobi_p, SeriesConfig};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn point(d: u32) -> impl Strategy<Value = Point> {
    let n = d as usize - 2;
    (-3.0..3.0f64, 0.01..FRAC_PI_2 - 0.05, prop::collection::vec(0.05..PI - 0.05, n)).prop_map(move |(t, r, mut ang)| {
        if let Some(last) = ang.last_mut() {
            *last *= 2.0;
        }
        Point::new(t, r, ang)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_transformation(a in -2.0..3.0f64, b in -2.0..3.0f64, c in 0.2..4.0f64, z in 0.0..0.9f64) {
        let cfg = SeriesConfig::default();
        let lhs = hyp2f1(a, b, c, z, &cfg).unwrap();
        let rhs = (1.0 - z).powf(c - a - b) * hyp2f1(c - a, c - b, c, z, &cfg).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn jacobi_reflection(k in 0u32..15, al in -0.9..5.0f64, be in -0.9..5.0f64, x in -1.0..1.0f64) {
        let lhs = jacobi_p(k, al, be, -x);
        let rhs = if k % 2 == 0 { 1.0 } else { -1.0 } * jacobi_p(k, be, al, x);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn embedding_lies_on_hyperboloid(a in 0.3..3.0f64, p in (3u32..8).prop_flat_map(point)) {
        let d = p.angles.len() as u32 + 2;
        let x = embed(&p, d, a).unwrap();
        prop_assert!((x.dot(&x) * a * a - 1.0).abs() < 1e-9 * (1.0 + p.r.tan().powi(2)));
    }

    #[test]
    fn invariant_is_symmetric_and_matches_embedding((x, y) in (3u32..7).prop_flat_map(|d| (point(d), point(d)))) {
        let d = x.angles.len() as u32 + 2;
        let z1 = invariant_z(&x, &y, d, 1.0).unwrap();
        let z2 = invariant_z(&y, &x, d, 1.0).unwrap();
        prop_assert!((z1 - z2).abs() <= 1e-12 * z1.abs().max(1.0));
        let ex = embed(&x, d, 1.0).unwrap();
        let ey = embed(&y, d, 1.0).unwrap();
        prop_assert!((ex.dot(&ey) - z1).abs() <= 1e-9 * z1.abs().max(1.0));
    }

    #[test]
    fn dirichlet_propagator_decreases(d in 3u32..8, frac in 0.05..0.95f64, z in 1.05..20.0f64) {
        let e0 = 0.5 * (d as f64 - 1.0) + frac;
        let p = PropagatorKind::new(Kind::DirichletClosed, d, e0, 1.0).unwrap();
        let (g1, g2) = (p.closed_form(z).unwrap(), p.closed_form(z * 1.1).unwrap());
        prop_assert!(g1 > g2 && g2 > 0.0, "{g1} {g2}");
    }

    #[test]
    fn boundary_exponent_is_leading(d in 3u32..8, l in 0u32..4, k in 0u32..5, frac in 0.05..0.95f64, neumann in any::<bool>()) {
        let e0 = 0.5 * (d as f64 - 1.0) + frac;
        let fam = if neumann { Family::Neumann } else { Family::Dirichlet };
        let prof = radial_profile(&ModeSpec::new(fam, d, e0, l, k, 1.0).unwrap()).unwrap();
        let lead = |c: f64| prof.eval(FRAC_PI_2 - c.asin()) / c.powf(prof.exponent_at_boundary);
        let (l1, l2) = (lead(1e-5), lead(1e-6));
        prop_assert!(l2 != 0.0 && (l1 - l2).abs() < 1e-6 * l2.abs(), "{l1} {l2}");
    }

    #[test]
    fn report_order_is_input_independent(mut names in prop::collection::vec("[a-z]{1,6}", 1..20)) {
        let cases: Vec<Case> = names.iter().map(|n| Case::check(n.as_str(), 0.0, 1.0, "")).collect();
        let r1 = VerificationReport::new("x", 1.0, cases.clone(), vec![]);
        let mut rev = cases;
        rev.reverse();
        let r2 = VerificationReport::new("x", 1.0, rev, vec![]);
        prop_assert_eq!(r1.to_json(), r2.to_json());
        names.sort();
        let got: Vec<String> = r1.cases.iter().map(|c| c.name.clone()).collect();
        prop_assert_eq!(got, names);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kg_product_is_hermitian(d in 3u32..6, l in 0u32..3, k1 in 0u32..3, k2 in 0u32..3, t in 0.0..3.0f64) {
        let q = QuadratureConfig::default();
        let e0 = 0.5 * (d as f64 - 1.0) + 0.4;
        let m1 = ModeSpec::new(Family::Dirichlet, d, e0, l, k1, 1.0).unwrap();
        let m2 = ModeSpec::new(Family::Neumann, d, e0, l, k2, 1.0).unwrap();
        let ab = kg_inner_at(&m1, &m2, t, &q).unwrap();
        let ba = kg_inner_at(&m2, &m1, t, &q).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
    }
}
