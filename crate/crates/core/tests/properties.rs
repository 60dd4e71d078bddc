mod common;

use common::{random_formula, random_trace, table};
use leadsynth::dwell::{max_dwell, min_dwell};
use leadsynth::milp::{solve, MilpStatus, VarKind};
use leadsynth::mtl::{eval_strong, eval_weak, necessary_length, parse, rewrite_at, MtlFormula};
use leadsynth::plant::{planar_follower, sample_disturbance, Follower, FollowerModel};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn case(seed: u64, depth: usize, len: usize) -> (MtlFormula, leadsynth::mtl::Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_formula(&mut rng, depth, 4);
    (f, random_trace(&mut rng, len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn negation_swaps_views(seed in any::<u64>(), len in 1usize..10) {
        let atoms = table();
        let (f, tr) = case(seed, 4, len);
        let nf = MtlFormula::not(f.clone());
        for j in 0..len {
            prop_assert_eq!(eval_strong(&tr, j, &nf, &atoms), !eval_weak(&tr, j, &f, &atoms));
            prop_assert_eq!(eval_weak(&tr, j, &nf, &atoms), !eval_strong(&tr, j, &f, &atoms));
        }
    }

    #[test]
    fn strong_implies_weak(seed in any::<u64>(), len in 1usize..10) {
        let atoms = table();
        let (f, tr) = case(seed, 4, len);
        for j in 0..len {
            prop_assert!(!eval_strong(&tr, j, &f, &atoms) || eval_weak(&tr, j, &f, &atoms));
        }
    }

    #[test]
    fn long_enough_prefix_decides(seed in any::<u64>(), len in 1usize..14) {
        let atoms = table();
        let (f, tr) = case(seed, 3, len);
        let need = necessary_length(&f).expect("bounded intervals");
        for j in (0..len).filter(|j| j + need <= tr.last_index()) {
            prop_assert_eq!(eval_strong(&tr, j, &f, &atoms), eval_weak(&tr, j, &f, &atoms));
        }
    }

    #[test]
    fn rewriting_agrees_with_the_full_trace(seed in any::<u64>(), len in 1usize..10, cut in 0usize..10) {
        let atoms = table();
        let (f, tr) = case(seed, 3, len);
        let current = cut.min(len - 1);
        let prefix = tr.prefix(current);
        let expr = rewrite_at(&f, 0, current, &prefix, &atoms, Some(tr.last_index())).unwrap();
        let got = expr.eval(&mut |a| atoms.holds(&a.name, &tr, a.index));
        prop_assert_eq!(got, eval_weak(&tr, 0, &f, &atoms));
    }

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let atoms = table();
        let (f, _) = case(seed, 4, 1);
        prop_assert_eq!(parse(&f.to_string(), &atoms).unwrap(), f);
    }

    #[test]
    fn optimal_points_satisfy_every_row(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::milp::random_instance(&mut rng, 6);
        let model = common::milp::build(&inst);
        let sol = solve(&model, 100_000);
        if sol.status == MilpStatus::Optimal {
            let x = sol.values.as_ref().unwrap();
            prop_assert!(model.max_violation(x) <= 1e-6);
            for v in model.vars().iter().zip(x).filter(|(v, _)| v.kind == VarKind::Binary).map(|(_, x)| x) {
                prop_assert!((v - v.round()).abs() <= 1e-6);
            }
        }
        let again = solve(&model, 100_000);
        prop_assert_eq!(format!("{:?}", sol), format!("{:?}", again));
    }

    #[test]
    fn max_dwell_orders(l in 0.1f64..3.0, v in 0.1f64..5.0, dv in 0.01f64..2.0, d in 0.001f64..1.0, dd in 0.001f64..1.0) {
        prop_assert!(max_dwell(l, v + dv, d) > max_dwell(l, v, d));
        prop_assert!(max_dwell(l, v, d + dd) < max_dwell(l, v, d));
    }

    #[test]
    fn min_dwell_orders(k in 0.01f64..2.0, dk in 0.01f64..1.0, v in 0.1f64..2.0, e in 0.0f64..50.0, de in 0.1f64..10.0) {
        let e = v + 0.01 + e;
        prop_assert!(min_dwell(k, v, e + de) < min_dwell(k, v, e));
        prop_assert!(min_dwell(k + dk, v, e) < min_dwell(k, v, e));
    }

    #[test]
    fn disturbances_stay_in_the_ball(seed in any::<u64>(), dbar in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let d = sample_disturbance(&mut rng, dbar, &[true, true, false]);
            prop_assert!(d.norm() <= dbar * (1.0 + 1e-12));
            prop_assert_eq!(d[2], 0.0);
        }
    }

    #[test]
    fn error_split_is_exact(seed in any::<u64>(), x0 in prop::array::uniform2(-30.0f64..30.0), k in 0.05f64..0.5) {
        let model = FollowerModel::new(planar_follower()).unwrap();
        let xg = DVector::zeros(3);
        let mut f = Follower::new(DVector::from_vec(vec![x0[0], x0[1], 0.0]), k, 0.04);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for step in 0..10 {
            f.advance(&model, &xg, 0.5, 50, || sample_disturbance(&mut rng, 0.04, &[true, true, false]));
            if step % 4 == 3 {
                f.service_reset(step as f64);
            }
            let e = f.errors(&xg);
            let gap = (&e.e1 + &e.e2) - (&xg - &f.x);
            prop_assert!(gap.norm() <= 1e-9);
        }
    }
}
