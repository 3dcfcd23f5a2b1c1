use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::Arc;

use proptest::prelude::*;

use hofer_core::dynamics::{
    classify_start, closed_form_flow, flow_with, hofer_length, FlowOptions, Hamiltonian, HamiltonianFn,
    MomentHamiltonian, OrbitConfig, Verdict,
};
use hofer_core::embeddings::{BlowupChain, DiskRectFamily, DiskRectVariant, ProductEmbedding, SymplecticMapSpec};
use hofer_core::geometry::{moment_map_rho, polytope, ManifoldModel, Point};
use hofer_core::numeric::substream;
use hofer_core::regions::{region_below, RegionPoint};

fn projective(p: &Point) -> &hofer_core::geometry::ProjectivePoint {
    match p {
        Point::Projective(q) => q,
        _ => panic!("expected a projective point"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn moment_image_lies_in_polytope(seed in any::<u64>(), lambda in 0.05f64..0.95) {
        for m in [ManifoldModel::Cp2, ManifoldModel::blowup(lambda).unwrap()] {
            let poly = polytope(&m).unwrap();
            let p = m.sample(&mut substream(seed, 0));
            let rho = moment_map_rho(projective(&p)).unwrap();
            prop_assert!(poly.margin(rho) >= -1e-12);
        }
    }

    #[test]
    fn blowup_samples_avoid_the_removed_ball(seed in any::<u64>(), lambda in 0.05f64..0.95) {
        let m = ManifoldModel::blowup(lambda).unwrap();
        let q = m.sample(&mut substream(seed, 1));
        let q = projective(&q);
        prop_assert!(q.norm_sq(1) + q.norm_sq(2) >= lambda * lambda);
    }

    #[test]
    fn length_scales_linearly(c in 0.1f64..5.0) {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let a = hofer_length(&h, 1, 100, 3);
        let b = hofer_length(&h.scaled(c), 1, 100, 3);
        prop_assert!((b.value - c * a.value).abs() <= c * a.error + b.error + 1e-9);
    }

    #[test]
    fn integrated_flow_matches_rotation(seed in any::<u64>(), t in 0.05f64..1.0, use_q in any::<bool>()) {
        let m = ManifoldModel::blowup(0.4).unwrap();
        let (name, h) = if use_q {
            ("Q", MomentHamiltonian::q(m.clone()).unwrap())
        } else {
            ("P", MomentHamiltonian::p(m.clone()).unwrap())
        };
        let x0 = m.sample(&mut substream(seed, 2));
        let traj = flow_with(&h, &x0, 0.0, t, FlowOptions::new(1e-12)).unwrap();
        let exact = closed_form_flow(name, &x0, t).unwrap();
        prop_assert!(m.distance(traj.samples.last().map(|s| &s.1).unwrap(), &exact) <= 1e-6);
        prop_assert!(traj.energy_drift.unwrap() <= 1e-8);
    }

    #[test]
    fn disk_family_is_nested(u in -0.3f64..0.3, v in -0.3f64..0.3, outer in 0.45f64..0.65) {
        prop_assume!(u.hypot(v) < 0.42);
        for variant in [DiskRectVariant::MinusCp2, DiskRectVariant::PlusCp2] {
            let small = DiskRectFamily::build(variant, 0.42, 0.05).unwrap();
            let big = DiskRectFamily::build(variant, outer.min(FRAC_1_SQRT_2 - 0.05), 0.05).unwrap();
            prop_assert_eq!(small.evaluate(u, v).unwrap(), big.evaluate(u, v).unwrap());
        }
    }

    #[test]
    fn disk_family_stays_in_its_rectangle(r in 0.0f64..0.65, theta in 0.0f64..std::f64::consts::TAU) {
        let fam = DiskRectFamily::build(DiskRectVariant::MinusCp2, FRAC_1_SQRT_2 - 0.05, 0.05).unwrap();
        prop_assert!(fam.containment_margin(r * theta.cos(), r * theta.sin()).unwrap() >= -1e-12);
    }

    #[test]
    fn blowup_chain_round_trips(seed in any::<u64>()) {
        let c = BlowupChain::new(0.5, 0.8).unwrap();
        let t = c.sample_t(&mut substream(seed, 3));
        let v = c.t_to_v(t).unwrap();
        let back = c.v_to_t(v).unwrap();
        for i in 0..4 {
            prop_assert!((back[i] - t[i]).abs() < 1e-8);
        }
        let t4 = c.t4_to_t(c.t_to_t4(t));
        for i in 0..4 {
            prop_assert!((t4[i] - t[i]).abs() < 1e-12);
        }
        let u = c.v_to_u(v).unwrap();
        let v2 = c.u_to_v(&u).unwrap();
        prop_assert!((v2[0] - v[0]).norm() < 1e-8 && (v2[1] - v[1]).norm() < 1e-8);
    }

    #[test]
    fn psi_minus_respects_graph_margin(seed in any::<u64>()) {
        let psi = ProductEmbedding::psi_minus(0.05, 0.1).unwrap();
        let x = psi.sample_domain(&mut substream(seed, 4));
        let y = psi.evaluate(&x).unwrap();
        prop_assert!(psi.graph_margin(&y) >= psi.graph_margin_bound() - 1e-9);
    }

    #[test]
    fn lower_regions_grow_with_nu(seed in any::<u64>(), s in -0.1f64..1.7, t in 0.0f64..1.0, nu in 0.0f64..0.2, extra in 0.0f64..0.2) {
        let h: HamiltonianFn = Arc::new(MomentHamiltonian::p(ManifoldModel::Cp2).unwrap());
        let small = region_below(h.clone(), nu).unwrap();
        let large = region_below(h, nu + extra).unwrap();
        let q = RegionPoint { x: ManifoldModel::Cp2.sample(&mut substream(seed, 5)), s, t };
        prop_assert!(!small.contains(&q) || large.contains(&q));
    }
}

#[test]
fn period_of_scaled_p_is_two_over_c() {
    let m = ManifoldModel::Cp2;
    let x0 = m.sample(&mut substream(9, 0));
    let h = MomentHamiltonian::p(m).unwrap();
    for c in [1.0, 2.0, 4.0] {
        let r = classify_start(&h.scaled(c), &x0, 4.0, &OrbitConfig::default());
        match r.verdict {
            Verdict::Periodic { period } => assert!((period - 2.0 / c).abs() < 1e-4, "c = {c}: {period}"),
            other => panic!("c = {c}: {other:?}"),
        }
    }
    assert!((h.value(&x0, 0.0) - h.scaled(2.0).value(&x0, 0.0) / 2.0).abs() < 1e-15);
    assert!(h.analytic_length().unwrap() == FRAC_PI_2);
}
