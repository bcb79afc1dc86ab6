use std::f64::consts::PI;

use holistic::grid_ops::{apply, apply_slice, matrix_of, symbol, GridField, Operator};
use holistic::models::{reflect_negate, ModelKind, ModelSpec};
use holistic::sim::{count_extrema, symmetrize};
use proptest::prelude::*;

fn field(n: usize) -> impl Strategy<Value = GridField> {
    prop::collection::vec(-10.0f64..10.0, n)
        .prop_map(move |v| GridField::new(v, 2.0 * PI / n as f64).unwrap())
}

fn any_field() -> impl Strategy<Value = GridField> {
    (3usize..24).prop_flat_map(field)
}

fn any_model() -> impl Strategy<Value = ModelSpec> {
    let gamma = 0.0f64..=1.0;
    let kind = prop_oneof![
        (0.0f64..=1.0).prop_map(|theta| ModelKind::Mixture { theta }),
        Just(ModelKind::Holistic1),
        Just(ModelKind::Holistic2),
    ];
    (kind, gamma, 0.1f64..3.0, -2.0f64..2.0)
        .prop_map(|(kind, g, nu, alpha)| ModelSpec::new(kind, g, nu, alpha).unwrap())
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #[test]
    fn s_preserves_the_sum(u in any_field()) {
        let su = apply(Operator::S, &u);
        let scale = u.values().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        let gap = (su.values().iter().sum::<f64>() - u.values().iter().sum::<f64>()).abs();
        prop_assert!(gap <= 1e-13 * scale);
    }

    #[test]
    fn s_inverts_its_inverse(u in any_field()) {
        let back = apply(Operator::S, &apply(Operator::SInverse, &u));
        prop_assert!(max_gap(back.values(), u.values()) <= 1e-12 * u.max_abs().max(1.0));
    }

    #[test]
    fn s_delta2_is_symmetric_and_dissipative(n in 3usize..20) {
        let m = matrix_of(n, |u| {
            let mut d = vec![0.0; n];
            let mut out = vec![0.0; n];
            apply_slice(Operator::Delta2, u, &mut d);
            apply_slice(Operator::S, &d, &mut out);
            out
        });
        for i in 0..n {
            for j in 0..n {
                prop_assert!((m[i][j] - m[j][i]).abs() < 1e-13);
            }
        }
        let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
        prop_assert!(mat.symmetric_eigenvalues().iter().all(|&e| e < 1e-12));
    }

    #[test]
    fn fourier_modes_pick_up_the_symbol(n in 3usize..20, k in 0usize..20) {
        let k = k % n;
        let kappa = 2.0 * PI * k as f64 / n as f64;
        let h = 2.0 * PI / n as f64;
        let re = GridField::from_fn(n, h, |x| (k as f64 * x).cos()).unwrap();
        let im = GridField::from_fn(n, h, |x| (k as f64 * x).sin()).unwrap();
        for op in [Operator::Delta2, Operator::MuDelta, Operator::Nabla, Operator::S, Operator::Shift(2)] {
            let s = symbol(op, kappa);
            let (ar, ai) = (apply(op, &re), apply(op, &im));
            for j in 0..n {
                // op e^{ijκ} = s e^{ijκ}
                let (c, sn) = (re.values()[j], im.values()[j]);
                prop_assert!((ar.values()[j] - (s.re * c - s.im * sn)).abs() < 1e-12);
                prop_assert!((ai.values()[j] - (s.re * sn + s.im * c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closures_commute_with_reflection_negation(u in any_field(), spec in any_model()) {
        let lhs = spec.rhs(&reflect_negate(&u));
        let rhs = reflect_negate(&spec.rhs(&u));
        let scale = spec.rhs(&u).max_abs().max(1.0);
        prop_assert!(max_gap(lhs.values(), rhs.values()) <= 1e-12 * scale);
    }

    #[test]
    fn closures_commute_with_shifts(u in any_field(), spec in any_model(), s in 1i64..5) {
        let lhs = spec.rhs(&apply(Operator::Shift(s), &u));
        let rhs = apply(Operator::Shift(s), &spec.rhs(&u));
        let scale = spec.rhs(&u).max_abs().max(1.0);
        prop_assert!(max_gap(lhs.values(), rhs.values()) <= 1e-12 * scale);
    }

    #[test]
    fn constants_are_equilibria(c in -5.0f64..5.0, n in 3usize..16, spec in any_model()) {
        let u = GridField::from_fn(n, 2.0 * PI / n as f64, |_| c).unwrap();
        prop_assert!(spec.rhs(&u).max_abs() <= 1e-12 * (1.0 + c * c));
    }

    #[test]
    fn symmetrize_projects_onto_invariant_fields(u in any_field()) {
        let mut v = u.values().to_vec();
        symmetrize(&mut v);
        let g = u.with_values(v.clone());
        prop_assert_eq!(reflect_negate(&g).into_values(), v.clone());
        let mut again = v.clone();
        symmetrize(&mut again);
        prop_assert_eq!(again, v);
    }

    #[test]
    fn extrema_count_is_even_and_shift_invariant(u in any_field(), s in 1i64..5) {
        let c = count_extrema(u.values());
        prop_assert_eq!(c % 2, 0);
        prop_assert_eq!(count_extrema(apply(Operator::Shift(s), &u).values()), c);
    }
}
