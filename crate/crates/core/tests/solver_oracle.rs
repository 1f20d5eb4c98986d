mod common;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use slope_core::lambda::lambda_bh;
use slope_core::solver::{
    duality_gap, solve, solve_fista, solve_from, solve_proximal_gradient, Acceleration,
    SlopeProblem, SolverConfig, StepRule,
};
use slope_core::LambdaSequence;

fn tight() -> SolverConfig {
    SolverConfig {
        tolerance: 1e-14,
        max_iters: 200_000,
        ..SolverConfig::default()
    }
}

fn orthonormal(r: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| r.sample::<f64, _>(StandardNormal))
        .qr()
        .q()
}

#[test]
fn orthonormal_design_reduces_to_prox_of_correlations() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let p = r.random_range(1..=8);
        let n = p + r.random_range(0..10);
        let x = orthonormal(&mut r, n, p);
        let y = DVector::from_fn(n, |_, _| 3.0 * r.sample::<f64, _>(StandardNormal));
        let lam = common::random_lambda(&mut r, p);
        let problem = SlopeProblem::new(&x, &y, LambdaSequence::new(lam.clone()).unwrap()).unwrap();
        let sol = solve(&problem, &tight()).unwrap();
        assert!(sol.converged);
        let z: Vec<f64> = x.tr_mul(&y).iter().copied().collect();
        let oracle = common::brute_force_prox(&z, &lam);
        for (a, b) in sol.beta.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "{:?} vs {oracle:?}", sol.beta);
        }
    }
}

/// Optimality of `β` for a general design: `g = Xᵀ(y − Xβ)` lies in the dual
/// ball of the sorted-ℓ1 norm and `⟨g, β⟩ = J(β)`.
#[test]
fn solutions_satisfy_optimality_certificate() {
    let mut r = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let n = r.random_range(5..40);
        let p = r.random_range(2..60);
        let x = DMatrix::from_fn(n, p, |_, _| {
            r.sample::<f64, _>(StandardNormal) / (n as f64).sqrt()
        });
        let y = DVector::from_fn(n, |_, _| 2.0 * r.sample::<f64, _>(StandardNormal));
        let lam = common::random_lambda(&mut r, p);
        let problem = SlopeProblem::new(&x, &y, LambdaSequence::new(lam.clone()).unwrap()).unwrap();
        for accel in [Acceleration::Fista, Acceleration::Plain] {
            let cfg = SolverConfig {
                acceleration: accel,
                ..tight()
            };
            let sol = solve(&problem, &cfg).unwrap();
            assert!(sol.converged);
            let resid = &y - &x * DVector::from_column_slice(&sol.beta);
            let g: Vec<f64> = x.tr_mul(&resid).iter().copied().collect();
            // β = prox(β + g) at unit step
            let shifted: Vec<f64> = sol.beta.iter().zip(&g).map(|(b, gi)| b + gi).collect();
            let v = common::certificate_violation(&shifted, &sol.beta, &lam);
            assert!(v < 1e-5, "certificate violation {v}");
        }
    }
}

#[test]
fn overdetermined_small_penalty_approaches_least_squares() {
    let mut r = ChaCha8Rng::seed_from_u64(23);
    let (n, p) = (60, 5);
    let x = DMatrix::from_fn(n, p, |_, _| r.sample::<f64, _>(StandardNormal));
    let y = DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal));
    let ols = x.clone().svd(true, true).solve(&y, 1e-12).unwrap();
    let problem = SlopeProblem::new(&x, &y, LambdaSequence::constant(p, 1e-9).unwrap()).unwrap();
    let sol = solve(&problem, &tight()).unwrap();
    for (a, b) in sol.beta.iter().zip(ols.iter()) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn plain_fista_and_warm_start_agree() {
    let mut r = ChaCha8Rng::seed_from_u64(24);
    let (n, p) = (40, 80);
    let x = DMatrix::from_fn(n, p, |_, _| {
        r.sample::<f64, _>(StandardNormal) / (n as f64).sqrt()
    });
    let mut beta = DVector::zeros(p);
    beta.rows_mut(0, 4).fill(5.0);
    let y = &x * beta + DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal));
    let problem = SlopeProblem::new(&x, &y, lambda_bh(p, 0.1).unwrap()).unwrap();
    let a = solve_fista(&problem, &tight()).unwrap();
    let b = solve_proximal_gradient(&problem, &tight()).unwrap();
    let c = solve_from(&problem, &tight(), Some(&b.beta)).unwrap();
    let fixed = SolverConfig {
        step_rule: StepRule::Fixed(1.0 / problem.lipschitz()),
        ..tight()
    };
    let d = solve(&problem, &fixed).unwrap();
    for other in [&b, &c, &d] {
        let diff = a
            .beta
            .iter()
            .zip(&other.beta)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }
    assert!(c.iterations <= b.iterations);
    assert!(duality_gap(&problem, &a.beta).unwrap() <= 1e-10 * a.objective);
}
