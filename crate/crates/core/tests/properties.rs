use nullcurve::dynamics::{el_field, moment_map, phase_embed, PhaseState};
use nullcurve::e21::*;
use nullcurve::elliptic::{jacobi, wp, WeierstrassInvariants};
use nullcurve::frenet::{analyze_curve, synthesize_curve};
use nullcurve::mink3::{det3, mink_cross, mink_inner, MinkVector};
use nullcurve::reduce::{classify_orbit, cross_section, OrbitKind};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = MinkVector> {
    (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| MinkVector::new(a, b, c))
}

fn algebra(r: f64) -> impl Strategy<Value = AlgebraElement> {
    (vec3(r), -r..r, -r..r, -r..r).prop_map(|(q, a, b, c)| AlgebraElement::new(q, a, b, c))
}

fn coalgebra(r: f64) -> impl Strategy<Value = CoalgebraElement> {
    (vec3(r), vec3(r)).prop_map(|(p, v)| CoalgebraElement::new(p, v))
}

fn group() -> impl Strategy<Value = GroupElement> {
    algebra(1.0).prop_map(|x| exp_algebra(&x, 1.0))
}

fn state() -> impl Strategy<Value = PhaseState> {
    (prop_oneof![-2.0..-0.3, 0.3..2.0], -2.0..2.0, -2.0..2.0, -2.0..2.0)
        .prop_map(|(m, k, l4, l5)| PhaseState::new(m, k, l4, l5).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cross_product_is_metric_dual_of_det(a in vec3(3.0), b in vec3(3.0), c in vec3(3.0)) {
        prop_assert!(close(mink_inner(mink_cross(a, b), c), det3(a, b, c), 1e-12));
        prop_assert!(mink_inner(mink_cross(a, b), a).abs() < 1e-12 * (1.0 + a.norm_inf() * a.norm_inf() * b.norm_inf()));
    }

    #[test]
    fn exponential_lands_in_group(x in algebra(2.0)) {
        prop_assert!(exp_algebra(&x, 1.0).is_valid(1e-9));
    }

    #[test]
    fn group_laws(g in group(), h in group()) {
        prop_assert!(g.compose(&g.inverse()).distance(&GroupElement::identity()) < 1e-10);
        let gh = g.compose(&h);
        prop_assert!(gh.inverse().distance(&h.inverse().compose(&g.inverse())) < 1e-9);
    }

    #[test]
    fn adjoint_is_a_homomorphism(g in group(), h in group(), x in algebra(1.0)) {
        let lhs = adjoint(&g.compose(&h), &x);
        let rhs = adjoint(&g, &adjoint(&h, &x));
        prop_assert!(lhs.add(&rhs.scale(-1.0)).norm() < 1e-8 * (1.0 + lhs.norm()));
    }

    #[test]
    fn bracket_jacobi(x in algebra(1.0), y in algebra(1.0), z in algebra(1.0)) {
        let j = bracket(&x, &bracket(&y, &z))
            .add(&bracket(&y, &bracket(&z, &x)))
            .add(&bracket(&z, &bracket(&x, &y)));
        prop_assert!(j.norm() < 1e-12);
    }

    #[test]
    fn pairing_is_invariant(g in group(), eta in coalgebra(2.0), x in algebra(1.0)) {
        let a = pairing(&coadjoint(&g, &eta), &adjoint(&g, &x));
        prop_assert!(close(a, pairing(&eta, &x), 1e-9));
    }

    #[test]
    fn casimirs_are_coadjoint_invariant(g in group(), eta in coalgebra(2.0)) {
        let (a, b) = casimirs(&eta);
        let (c, d) = casimirs(&coadjoint(&g, &eta));
        prop_assert!(close(a, c, 1e-9) && close(b, d, 1e-9));
    }

    #[test]
    fn ad_star_is_coadjoint_derivative(x in algebra(1.0), eta in coalgebra(2.0)) {
        let h = 1e-4;
        let fd = coadjoint(&exp_algebra(&x, h), &eta)
            .sub(&coadjoint(&exp_algebra(&x, -h), &eta))
            .scale(0.5 / h);
        prop_assert!(fd.sub(&ad_star(&x, &eta)).norm_inf() < 1e-6);
    }

    #[test]
    fn isotropy_is_abelian_of_dimension_two(eta in coalgebra(2.0)) {
        prop_assume!(eta.p.norm_inf() > 0.1);
        let basis = isotropy_basis(&eta, 1e-12).unwrap();
        prop_assert_eq!(basis.len(), 2);
        prop_assert!(bracket(&basis[0], &basis[1]).norm() < 1e-10);
        for b in &basis {
            prop_assert!(ad_star(b, &eta).norm_inf() < 1e-10);
        }
    }

    #[test]
    fn casimirs_are_first_integrals(s in state()) {
        let f = el_field(&s);
        let h = 1e-6;
        let c = |d: f64| casimirs(&phase_embed(&s.with_fiber(&[s.k + d * f[0], s.l4 + d * f[1], s.l5 + d * f[2]])));
        let (a, b) = (c(h), c(-h));
        prop_assert!(((a.0 - b.0) / (2.0 * h)).abs() < 1e-7);
        prop_assert!(((a.1 - b.1) / (2.0 * h)).abs() < 1e-7);
    }

    #[test]
    fn moment_map_is_equivariant(s in state(), g in group(), h in group()) {
        let lhs = moment_map(&g.compose(&h), &s);
        let rhs = coadjoint(&g, &moment_map(&h, &s));
        prop_assert!(lhs.sub(&rhs).norm_inf() < 1e-8 * (1.0 + lhs.norm_inf()));
    }

    #[test]
    fn sections_invert_coadjoint_action(eta in coalgebra(2.0), g in group()) {
        let moved = coadjoint(&g, &eta);
        prop_assume!(moved.p.norm_inf() > 0.2 && casimirs(&moved).0.abs() > 1e-3);
        let s = cross_section(&moved).unwrap();
        prop_assert!(coadjoint(&s.g, &s.mu_std).sub(&moved).norm_inf() < 1e-9 * (1.0 + moved.norm_inf()));
        let kind = classify_orbit(&moved, 1e-9).kind;
        prop_assert!(kind != OrbitKind::Singular);
    }

    #[test]
    fn jacobi_pythagoras(u in -20.0f64..20.0, m in 0.0f64..0.999) {
        let (sn, cn, dn) = jacobi::sncndn(u, m);
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-13);
        prop_assert!((dn * dn + m * sn * sn - 1.0).abs() < 1e-13);
    }

    #[test]
    fn weierstrass_differential_equation(g2 in -3.0f64..3.0, g3 in -3.0f64..3.0, t in 0.05f64..0.6) {
        let inv = WeierstrassInvariants::new(g2, g3);
        let (p, dp) = wp(t, &inv).unwrap();
        prop_assume!(p.abs() < 1e3);
        let rhs = 4.0 * p * p * p - g2 * p - g3;
        prop_assert!((dp * dp - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn frenet_frame_is_equivariant(c in -1.0f64..1.0, g in group()) {
        let grid: Vec<f64> = (0..=20).map(|i| 0.05 * i as f64).collect();
        let ff = synthesize_curve(&|t: f64| c + 0.3 * t, &GroupElement::identity(), &grid, 1e-12).unwrap();
        let moved = ff.translate(&g);
        for (a, b) in ff.frames.iter().zip(&moved.frames) {
            prop_assert!(g.compose(a).distance(b) < 1e-12);
        }
        let k = |t: f64| c + 0.3 * t;
        let jets = |t: f64| {
            let i = ((t / 0.05).round() as usize).min(20);
            let f = moved.frames[i];
            let (a1, a2, a3) = (f.column(0), f.column(1), f.column(2));
            [f.q, a1, a2, k(t) * a1 + a3]
        };
        let back = analyze_curve(&jets, &grid, 1e-8).unwrap();
        for (a, b) in back.frames.iter().zip(&moved.frames) {
            prop_assert!(a.distance(b) < 1e-9);
        }
    }
}
