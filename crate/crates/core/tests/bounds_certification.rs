//! Certification sweeps: the one-step comparison inequalities over
//! randomized trials, every recorded bound over live solver traces, and a
//! corrupted-trace negative control.

use geodescent::{
    bounds, feasibility, solver, CurvatureConstants, ManifoldHandle, Point, RuleKind,
    SolverConfig, StepSizeRule, StopMode, SubgradientOracle, TheoremId,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ONE_STEP_TOL: f64 = 1e-7;

fn nearby<R: Rng + ?Sized>(
    m: &ManifoldHandle,
    anchor: &Point,
    radius: f64,
    rng: &mut R,
) -> Point {
    let u = m.random_unit_tangent(anchor, rng).unwrap();
    let t = rng.random_range(0.0..radius);
    m.exp(anchor, &u.scaled(t)).unwrap()
}

#[test]
fn one_step_inequalities_hold_across_a_thousand_spd_trials() {
    let instance = feasibility::generate_spd(10, 10, 1.0, 0.1, 21).unwrap();
    let m = instance.manifold();
    let oracle = instance.oracle().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut trials = 0;
    while trials < 1000 {
        let p = nearby(m, instance.target(), 3.0, &mut rng);
        let eval = oracle.evaluate(&p).unwrap();
        if eval.subgradient.is_zero() {
            continue; // slack branch: no step to take
        }
        let q = nearby(m, instance.target(), 3.0, &mut rng);
        let f_q = oracle.evaluate(&q).unwrap().value;
        let t = rng.random_range(0.0..2.0);
        let margins =
            bounds::certify_one_step(m, &p, &q, &eval.subgradient, eval.value, f_q, t, -0.5)
                .unwrap();
        assert!(
            margins.cosh_margin >= -ONE_STEP_TOL,
            "cosh margin {} at trial {trials}",
            margins.cosh_margin
        );
        assert!(
            margins.squared_margin >= -ONE_STEP_TOL,
            "squared margin {} at trial {trials}",
            margins.squared_margin
        );
        trials += 1;
    }
}

#[test]
fn one_step_inequalities_hold_across_a_thousand_sphere_trials_per_kappa() {
    let instance =
        feasibility::generate_sphere(200, 50, std::f64::consts::PI / 16.0, 1e-3, 21, None)
            .unwrap();
    let m = instance.manifold();
    let oracle = instance.oracle().unwrap();
    // Any negative constant bounds the sphere's curvature from below, so the
    // inequalities must hold for every such choice.
    for kappa in [-1e-3, -1.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let mut trials = 0;
        while trials < 1000 {
            let p = nearby(m, instance.target(), 1.2, &mut rng);
            let eval = oracle.evaluate(&p).unwrap();
            if eval.subgradient.is_zero() {
                continue;
            }
            let q = nearby(m, instance.target(), 1.2, &mut rng);
            let f_q = oracle.evaluate(&q).unwrap().value;
            let t = rng.random_range(0.0..0.5);
            let margins =
                bounds::certify_one_step(m, &p, &q, &eval.subgradient, eval.value, f_q, t, kappa)
                    .unwrap();
            assert!(
                margins.cosh_margin >= -ONE_STEP_TOL,
                "cosh margin {} at kappa {kappa}, trial {trials}",
                margins.cosh_margin
            );
            assert!(
                margins.squared_margin >= -ONE_STEP_TOL,
                "squared margin {} at kappa {kappa}, trial {trials}",
                margins.squared_margin
            );
            trials += 1;
        }
    }
}

fn spd_exogenous_rows(seed: u64) -> (Vec<solver::TraceRow>, CurvatureConstants) {
    let instance = feasibility::generate_spd(10, 10, 1.0, 0.1, seed).unwrap();
    let oracle = instance.oracle().unwrap();
    let d0 = instance.initial_distance().unwrap();
    let config = SolverConfig::new(600, StopMode::Feasibility)
        .with_reference(instance.target().clone());
    let trace = solver::run(
        instance.manifold(),
        &oracle,
        instance.start(),
        &StepSizeRule::harmonic(),
        &config,
    )
    .unwrap();
    let constants = CurvatureConstants {
        kappa: -0.5,
        tau: 1.0,
        d_ref: d0,
        rule: RuleKind::Exogenous { sigma: solver::HARMONIC_SIGMA },
    };
    (trace.scalar_rows(), constants)
}

fn sphere_polyak_rows(seed: u64) -> (Vec<solver::TraceRow>, CurvatureConstants) {
    let instance =
        feasibility::generate_sphere(200, 50, std::f64::consts::PI / 16.0, 1e-3, seed, None)
            .unwrap();
    let oracle = instance.oracle().unwrap();
    let d0 = instance.initial_distance().unwrap();
    let alpha = 1.9999 * d0.tanh() / d0;
    let rule = StepSizeRule::polyak(alpha, -1e-3, d0).unwrap();
    let config = SolverConfig::new(400, StopMode::Feasibility)
        .with_reference(instance.target().clone());
    let trace =
        solver::run(instance.manifold(), &oracle, instance.start(), &rule, &config).unwrap();
    let constants = CurvatureConstants {
        kappa: 0.0,
        tau: 1.0,
        d_ref: d0,
        rule: RuleKind::Polyak { alpha },
    };
    (trace.scalar_rows(), constants)
}

#[test]
fn every_exogenous_bound_certifies_on_live_runs() {
    for seed in 0..6u64 {
        let (rows, constants) = spd_exogenous_rows(seed);
        for theorem in [
            TheoremId::ExogenousComplexity,
            TheoremId::StepInequality,
            TheoremId::QuasiFejer,
        ] {
            let report = bounds::certify_trace(&rows, theorem, &constants).unwrap();
            assert!(
                report.is_certified(),
                "{} violated on seed {seed} at row {:?}",
                theorem.token(),
                report.first_violation
            );
            assert!(report.min_margin().unwrap() >= 0.0);
        }
    }
}

#[test]
fn every_polyak_bound_certifies_on_live_runs() {
    for seed in 0..6u64 {
        let (rows, constants) = sphere_polyak_rows(seed);
        if rows.len() < 2 {
            continue; // feasible at the start: nothing to certify stepwise
        }
        for theorem in [
            TheoremId::PolyakComplexity,
            TheoremId::PolyakSumBound,
            TheoremId::PolyakDecrease,
            TheoremId::FlatPolyakDecrease,
        ] {
            let report = bounds::certify_trace(&rows, theorem, &constants).unwrap();
            assert!(
                report.is_certified(),
                "{} violated on seed {seed} at row {:?}",
                theorem.token(),
                report.first_violation
            );
        }
    }
}

#[test]
fn quasi_fejer_perturbation_budget_is_finite_and_positive() {
    let (rows, constants) = spd_exogenous_rows(0);
    let c = constants.complexity_constant().unwrap();
    let budget: f64 = rows
        .iter()
        .filter_map(|r| r.step)
        .map(|t| c * t * t)
        .sum();
    assert!(budget.is_finite() && budget > 0.0);
    // The whole-run budget never exceeds the closed-form ceiling C * sigma.
    assert!(budget <= c * solver::HARMONIC_SIGMA + 1e-12);
}

#[test]
fn an_inflated_gap_breaks_certification_at_the_corrupted_row() {
    // Prefix minimum bounds are insensitive to one upward-corrupted gap, so
    // the negative control targets the per-step inequalities, which consume
    // the gap directly.
    let (mut rows, constants) = spd_exogenous_rows(0);
    rows[0].gap = rows[0].gap.map(|g| g * 10.0);
    let report = bounds::certify_trace(&rows, TheoremId::StepInequality, &constants).unwrap();
    assert!(!report.is_certified());
    let violated = report.first_violation.unwrap();
    assert_eq!(report.rows[violated].n, 0);

    let (mut rows, constants) = sphere_polyak_rows(0);
    let target = 1; // corrupt an interior row this time
    rows[target].gap = rows[target].gap.map(|g| g * 10.0);
    let report = bounds::certify_trace(&rows, TheoremId::PolyakDecrease, &constants).unwrap();
    assert!(!report.is_certified());
    let violated = report.first_violation.unwrap();
    assert_eq!(report.rows[violated].n, 1);
}

#[test]
fn certification_requires_the_columns_it_consumes() {
    let (mut rows, constants) = spd_exogenous_rows(0);
    for row in &mut rows {
        row.dist_reference = None;
    }
    // Prefix bounds never touch the distance column...
    assert!(bounds::certify_trace(&rows, TheoremId::ExogenousComplexity, &constants).is_ok());
    // ...but per-step inequalities do.
    assert!(matches!(
        bounds::certify_trace(&rows, TheoremId::QuasiFejer, &constants),
        Err(geodescent::Error::MissingTraceColumn { .. })
    ));
}
