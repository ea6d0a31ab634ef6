mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turnpike_core::costs::{parabolic_cost, parabolic_cost_with, CostOptions, TrackingTarget};
use turnpike_core::domain::{Block, DomainMask, GridSpec};
use turnpike_core::pde::heat::HeatStepper;
use turnpike_core::pde::linalg::{SolverKind, SolverOptions};
use turnpike_core::pde::{solve_heat_sampled, solve_poisson};
use turnpike_core::ScalarField;

use common::{centered_class, dense_lambda1, random_admissible, random_field};

#[test]
fn implicit_euler_contracts_at_the_spectral_rate() {
    let grid = GridSpec::unit_square(14).unwrap();
    let class = centered_class(grid, 4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = SolverOptions::default();
    for _ in 0..8 {
        let mask = random_admissible(&mut rng, &class);
        let lambda = dense_lambda1(&mask);
        let dt = rng.gen_range(0.001..0.1);
        let y0 = random_field(&mut rng, &mask);
        let mut stepper = HeatStepper::new(&mask, &ScalarField::zeros(grid), &y0, dt, &opts).unwrap();
        let factor = 1.0 / (1.0 + dt * lambda);
        let mut prev = stepper.field().l2_norm_sq().sqrt();
        for _ in 0..40 {
            stepper.advance().unwrap();
            let next = stepper.field().l2_norm_sq().sqrt();
            assert!(next <= factor * prev * (1.0 + 1e-10), "{next} > {factor} * {prev}");
            prev = next;
        }
    }
}

#[test]
fn state_stays_below_the_uniform_bound() {
    let grid = GridSpec::unit_square(14).unwrap();
    let class = centered_class(grid, 4, 3);
    let lambda_d = dense_lambda1(&DomainMask::interior(grid).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..8 {
        let mask = random_admissible(&mut rng, &class);
        let y0 = random_field(&mut rng, &mask);
        let f = random_field(&mut rng, &DomainMask::interior(grid).unwrap()).scaled(20.0);
        let bound = y0.l2_norm_sq().sqrt() + f.l2_norm_sq().sqrt() / lambda_d;
        let traj = solve_heat_sampled(&mask, &f, &y0, 2.0, 0.02, 1, &SolverOptions::default()).unwrap();
        for y in &traj.states {
            assert!(y.l2_norm_sq().sqrt() <= bound * (1.0 + 1e-12));
        }
    }
}

/// The deviation from the steady state has time integrals of its L² and
/// gradient norms bounded independently of the horizon.
#[test]
fn deviation_integrals_are_horizon_independent() {
    let grid = GridSpec::unit_square(16).unwrap();
    let mask = DomainMask::interior_without(grid, &[Block::square(4, 4, 3)]).unwrap();
    let f = ScalarField::indicator(grid, Block::square(9, 9, 4), 10.0);
    let y0 = ScalarField::from_fn(grid, |x, y| x * y).restricted_to(&mask).unwrap();
    let p = solve_poisson(&mask, &f).unwrap();
    let lambda = dense_lambda1(&mask);
    let dt = 1.0 / 16.0;
    let r = 1.0 / (1.0 + dt * lambda);
    let d0 = y0.sub(&p).unwrap().l2_norm_sq();
    let l2_bound = dt * d0 / (1.0 - r * r);
    let grad_bound = 0.5 * d0;

    let mut stepper = HeatStepper::new(&mask, &f, &y0, dt, &SolverOptions::default()).unwrap();
    let (mut l2, mut grad) = (0.0, 0.0);
    let mut checkpoints = Vec::new();
    for k in 1..=(64 * 16usize) {
        l2 += dt * stepper.field().sub(&p).unwrap().l2_norm_sq();
        stepper.advance().unwrap();
        grad += dt * stepper.field().sub(&p).unwrap().gradient_norm_sq();
        assert!(l2 <= l2_bound * (1.0 + 1e-10));
        assert!(grad <= grad_bound * (1.0 + 1e-10));
        if k % 16 == 0 && (k / 16).is_power_of_two() {
            checkpoints.push(l2 + grad);
        }
    }
    // Converged: the last doublings of T add nothing measurable.
    let n = checkpoints.len();
    assert!((checkpoints[n - 1] - checkpoints[n - 3]).abs() <= 1e-12 * checkpoints[n - 1]);
}

fn tracking_fixture() -> (DomainMask, TrackingTarget) {
    let grid = GridSpec::unit_square(16).unwrap();
    let mask = DomainMask::interior_without(grid, &[Block::square(3, 3, 3)]).unwrap();
    let omega = DomainMask::block(grid, Block::square(7, 7, 3)).unwrap();
    let f = ScalarField::indicator(grid, Block::square(10, 3, 3), 10.0);
    let z = ScalarField::from_fn(grid, |x, y| 0.1 * x * (1.0 - x) * y)
        .restricted_to(&DomainMask::interior(grid).unwrap())
        .unwrap();
    let y0 = ScalarField::from_fn(grid, |x, _| x).restricted_to(&mask).unwrap();
    (mask, TrackingTarget::new(z, omega, f, y0).unwrap())
}

#[test]
fn time_average_matches_an_independent_quadrature() {
    let (mask, target) = tracking_fixture();
    let (horizon, dt) = (3.0, 0.05);
    let cg = SolverOptions {
        kind: SolverKind::ConjugateGradient,
        rel_tol: 1e-13,
        ..SolverOptions::default()
    };
    let traj = solve_heat_sampled(&mask, &target.f, &target.y0, horizon, dt, 1, &cg).unwrap();
    let steps = traj.states.len() - 1;
    let mut sum = 0.0;
    for y in &traj.states[..steps] {
        let (a, b) = target.mismatch(y).unwrap();
        sum += traj.dt * (a + b);
    }
    let manual = sum / horizon;
    let cost = parabolic_cost(&mask, &target, horizon, dt).unwrap().value;
    assert!(((cost - manual) / manual).abs() < 1e-9, "{cost} vs {manual}");

    let no_tail = CostOptions {
        tail_tol: 0.0,
        ..CostOptions::default()
    };
    let exact = parabolic_cost_with(&mask, &target, horizon, dt, &no_tail).unwrap().value;
    assert!(((cost - exact) / exact).abs() < 1e-11);
}

#[test]
fn tail_shortcut_is_invisible_at_long_horizons() {
    let (mask, target) = tracking_fixture();
    let no_tail = CostOptions {
        tail_tol: 0.0,
        ..CostOptions::default()
    };
    for horizon in [8.0, 32.0] {
        let fast = parabolic_cost(&mask, &target, horizon, 1.0 / 16.0).unwrap();
        let slow = parabolic_cost_with(&mask, &target, horizon, 1.0 / 16.0, &no_tail).unwrap();
        assert!(fast.pde_stats.tail_steps > 0);
        assert!(((fast.value - slow.value) / slow.value).abs() < 1e-11);
    }
}
