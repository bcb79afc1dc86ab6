use holistic::exec::Execution;
use holistic::models::ModelSpec;
use holistic::stability::{
    eigenvalues_at, find_equilibria, find_equilibria_with, mixture_m2_unstable_eigenvalues,
    mixture_m2_unstable_point, mixture_m3_analysis, reduce, ClosedForm, ReducedSystem,
    THETA_CRITICAL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn origin_is_stable_for_every_reduction() {
    let specs = [
        ModelSpec::mixture(0.0, 1.0, 1.0).unwrap(),
        ModelSpec::mixture(0.3, 1.0, 1.0).unwrap(),
        ModelSpec::mixture(2.0 / 3.0, 1.0, 1.0).unwrap(),
        ModelSpec::mixture(1.0, 1.0, 1.0).unwrap(),
        ModelSpec::holistic1(1.0, 1.0, 1.0).unwrap(),
    ];
    for spec in specs {
        for m in 1..=5 {
            let sys = reduce(&spec, m).unwrap();
            let ev = eigenvalues_at(&sys, &vec![0.0; m]).unwrap();
            assert!(ev.iter().all(|e| e.re < 0.0), "{} M = {m}: {ev:?}", spec.id());
        }
    }
}

#[test]
fn random_theta_matches_the_two_point_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let theta: f64 = rng.gen_range(0.0..1.0);
        if (theta - 2.0 / 3.0).abs() < 0.05 {
            continue;
        }
        for sys in [
            reduce(&ModelSpec::mixture(theta, 1.0, 1.0).unwrap(), 2).unwrap(),
            ReducedSystem::closed(ClosedForm::MixtureM2 { theta }),
        ] {
            let p = mixture_m2_unstable_point(theta).unwrap();
            let eq = find_equilibria(&sys, 1.5 * p[0].abs(), 9).unwrap();
            assert!(eq.len() == 2 || theta < 2.0 / 9.0, "θ = {theta}: {eq:?}");
            let v = eq
                .iter()
                .find(|v| v[0] != 0.0 && (v[0] + v[1]).abs() < 1e-9 * v[0].abs())
                .unwrap();
            assert!((v[0] - p[0]).abs() < 1e-8 * p[0].abs());
            assert!((v[1] - p[1]).abs() < 1e-8 * p[0].abs());
            let want = mixture_m2_unstable_eigenvalues(theta).unwrap();
            let ev = eigenvalues_at(&sys, v).unwrap();
            for (e, w) in ev.iter().zip(want) {
                assert!((e.re - w).abs() < 1e-8 * w.abs().max(1.0));
                assert!(e.im.abs() < 1e-8);
            }
        }
    }
}

#[test]
fn asymmetric_pair_sits_on_the_second_branch() {
    // summing the two equations gives (V₁ + V₂)(θ(V₁ − V₂)/4 − 1) = 0
    let theta = 0.1;
    let sys = ReducedSystem::closed(ClosedForm::MixtureM2 { theta });
    let eq = find_equilibria(&sys, 100.0, 11).unwrap();
    let off: Vec<&Vec<f64>> = eq.iter().filter(|v| (v[0] + v[1]).abs() > 1e-6).collect();
    assert_eq!(off.len(), 2);
    for v in off {
        assert!((v[0] - v[1] - 4.0 / theta).abs() < 1e-8 * 4.0 / theta);
    }
    let sys = ReducedSystem::closed(ClosedForm::MixtureM2 { theta: 0.3 });
    assert_eq!(find_equilibria(&sys, 100.0, 11).unwrap().len(), 2);
}

#[test]
fn theta_two_thirds_has_only_the_origin() {
    let sys = reduce(&ModelSpec::mixture(2.0 / 3.0, 1.0, 1.0).unwrap(), 2).unwrap();
    let eq = find_equilibria(&sys, 1e4, 11).unwrap();
    assert_eq!(eq, vec![vec![0.0, 0.0]]);
}

#[test]
fn three_point_count_changes_only_at_zero_and_theta_c() {
    let mut prev = mixture_m3_analysis(0.0).unwrap().unstable_count;
    let mut changes = Vec::new();
    for i in 1..=1000 {
        let theta = i as f64 * 1e-3;
        let c = mixture_m3_analysis(theta).unwrap().unstable_count;
        if c != prev {
            changes.push(theta);
        }
        prev = c;
    }
    assert_eq!(changes.len(), 2, "{changes:?}");
    assert!((changes[0] - 1e-3).abs() < 1e-12);
    assert!(changes[1] > THETA_CRITICAL && changes[1] - THETA_CRITICAL < 1e-3);
}

#[test]
fn three_point_analysis_agrees_with_newton() {
    for theta in [0.1, 0.2, 0.3] {
        let a = mixture_m3_analysis(theta).unwrap();
        let sys = ReducedSystem::closed(ClosedForm::MixtureM3 { theta });
        let w = a
            .critical_points
            .iter()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.abs()))
            * 1.5;
        let eq = find_equilibria(&sys, w, 9).unwrap();
        assert_eq!(eq.len(), 1 + a.unstable_count, "θ = {theta}");
        for p in &a.critical_points {
            let hit = eq.iter().any(|v| v.iter().zip(p).all(|(x, y)| (x - y).abs() < 1e-6 * w));
            assert!(hit, "θ = {theta}: {p:?} not found in {eq:?}");
            let ev = eigenvalues_at(&sys, p).unwrap();
            assert!(ev.iter().any(|e| e.re > 0.0));
        }
    }
}

#[test]
fn search_is_independent_of_execution_mode() {
    let sys = reduce(&ModelSpec::mixture(0.2, 1.0, 1.0).unwrap(), 3).unwrap();
    let a = find_equilibria_with(&sys, 60.0, 7, Execution::Sequential).unwrap();
    let b = find_equilibria_with(&sys, 60.0, 7, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
