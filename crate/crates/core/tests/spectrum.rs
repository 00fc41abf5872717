use std::f64::consts::PI;

use hypermin::stability::{
    critical_pitch, exhaustion, lambda1, lambda1_richardson, morse_index, square_schedule, Domain, FlatField, Grid,
    JacobiProblem, SolverOptions, StabilityError, VBoundary,
};
use hypermin::SurfaceChart;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square() -> Domain {
    Domain::new(0.0, 1.0, 0.0, 1.0).unwrap()
}

#[test]
fn flat_square_converges_at_second_order() {
    let field = FlatField { potential: |_: f64, _: f64| 0.0 };
    let exact = 2.0 * PI * PI;
    let r = lambda1_richardson(&field, unit_square(), 1.0 / 20.0, VBoundary::Dirichlet, &SolverOptions::default())
        .unwrap();
    let (e1, e2) = (r.coarse.lambda1 - exact, r.fine.lambda1 - exact);
    assert!((e1 / e2 - 4.0).abs() < 0.5, "ratio {}", e1 / e2);
    assert!((r.extrapolated - exact).abs() < 0.05 * e2.abs());
}

#[test]
fn constant_potential_shifts_the_spectrum() {
    let base = FlatField { potential: |_: f64, _: f64| 0.0 };
    let shifted = FlatField { potential: |_: f64, _: f64| 25.0 };
    let g = Grid { nu: 24, nv: 17 };
    let l0 = lambda1(&JacobiProblem::new(&base, unit_square(), g, VBoundary::Dirichlet).unwrap()).unwrap();
    let l1 = lambda1(&JacobiProblem::new(&shifted, unit_square(), g, VBoundary::Dirichlet).unwrap()).unwrap();
    assert!((l0.lambda1 - 25.0 - l1.lambda1).abs() < 1e-9);
    assert_eq!(l1.negative_count, 1);
}

struct Bumps(Vec<(f64, f64, f64, f64)>);

impl Bumps {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=4);
        Bumps(
            (0..n)
                .map(|_| {
                    (
                        rng.random_range(0.0..250.0),
                        rng.random_range(0.0..1.0),
                        rng.random_range(0.0..1.0),
                        rng.random_range(0.1..0.4),
                    )
                })
                .collect(),
        )
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        self.0
            .iter()
            .map(|&(c, x, y, w)| c * (-((u - x).powi(2) + (v - y).powi(2)) / (w * w)).exp())
            .sum()
    }
}

#[test]
fn inertia_matches_dense_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen_unstable = 0;
    for trial in 0..20 {
        let bumps = Bumps::random(&mut rng);
        let field = FlatField { potential: |u: f64, v: f64| bumps.eval(u, v) };
        let grid = if trial == 0 {
            Grid { nu: 40, nv: 40 }
        } else {
            Grid { nu: rng.random_range(3..=40), nv: rng.random_range(3..=40) }
        };
        let p = JacobiProblem::new(&field, unit_square(), grid, VBoundary::Dirichlet).unwrap();
        let asm = p.assemble().unwrap();
        let n = asm.a.n();
        let dense = DMatrix::from_row_slice(n, n, &asm.a.to_dense());
        let eig = dense.symmetric_eigenvalues();
        let closest = eig.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        assert!(closest > 1e-9, "trial {trial}: eigenvalue too close to zero");
        let expected = eig.iter().filter(|&&x| x < 0.0).count();
        let got = morse_index(&p).unwrap();
        assert_eq!(got.count, expected, "trial {trial}, {grid:?}");
        seen_unstable += usize::from(expected > 0);
    }
    assert!(seen_unstable >= 5);
}

#[test]
fn nested_squares_strictly_decrease() {
    let chart = SurfaceChart::helicoid(2.0).unwrap();
    let schedule = square_schedule(&[1.0, 1.5, 2.0, 3.0, 4.0]).unwrap();
    let r = exhaustion(&chart, &schedule, 0.1, VBoundary::Dirichlet, None, &SolverOptions::default(), &mut |_, _| {})
        .unwrap();
    assert!(r.strictly_decreasing, "{:?}", r.reports.iter().map(|x| x.lambda1).collect::<Vec<_>>());
    assert!(r.violations.is_empty());
    assert!(r.reports.iter().all(|x| x.ground_state_one_signed));
}

#[test]
fn non_nested_schedule_rejected() {
    let chart = SurfaceChart::helicoid(2.0).unwrap();
    let schedule = square_schedule(&[2.0, 1.0]).unwrap();
    let err = exhaustion(&chart, &schedule, 0.1, VBoundary::Dirichlet, None, &SolverOptions::default(), &mut |_, _| {})
        .unwrap_err();
    assert_eq!(err, StabilityError::NotNested { index: 1 });
}

#[test]
fn small_pitches_are_stable() {
    for a in [0.0, 1.0] {
        let chart = SurfaceChart::helicoid(a).unwrap();
        for h in [0.1, 0.05] {
            let p = JacobiProblem::with_spacing(&chart, Domain::square(3.0).unwrap(), h, VBoundary::Dirichlet).unwrap();
            let r = lambda1(&p).unwrap();
            assert!(r.lambda1 > 0.0, "a = {a}, h = {h}: {}", r.lambda1);
            assert_eq!(r.negative_count, 0);
            assert_eq!(morse_index(&p).unwrap().count, 0);
        }
    }
}

#[test]
fn lambda1_decreases_with_pitch() {
    let mut prev = f64::INFINITY;
    for a in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let chart = SurfaceChart::helicoid(a).unwrap();
        let p = JacobiProblem::with_spacing(&chart, Domain::square(3.0).unwrap(), 0.1, VBoundary::Dirichlet).unwrap();
        let l = lambda1(&p).unwrap().lambda1;
        assert!(l < prev, "a = {a}: {l} !< {prev}");
        prev = l;
    }
}

#[test]
fn large_pitch_regression() {
    let chart = SurfaceChart::helicoid(3.0).unwrap();
    let p = JacobiProblem::with_spacing(&chart, Domain::square(3.0).unwrap(), 0.1, VBoundary::Dirichlet).unwrap();
    let r = lambda1(&p).unwrap();
    println!("a = 3 on [-3,3]^2 at 0.1: {:.12} (index {})", r.lambda1, r.negative_count);
    assert!((r.lambda1 + 2.247319478894).abs() < 1e-8);
    assert_eq!(r.negative_count, 3);
    assert!(r.ground_state_one_signed);
    assert!(r.residual < 1e-8);
}

#[test]
fn periodic_catenoid_annulus() {
    let a_bar = 0.3;
    let chart = SurfaceChart::ball_catenoid(a_bar, 1.2, 1e-10).unwrap();
    let d = Domain::new(-1.2, 1.2, 0.0, 2.0 * PI).unwrap();
    let p = JacobiProblem::new(&chart, d, Grid { nu: 59, nv: 48 }, VBoundary::Periodic).unwrap();
    let r = lambda1(&p).unwrap();
    println!("ball catenoid {a_bar}: {:.12} (index {})", r.lambda1, r.negative_count);
    assert!(r.ground_state_one_signed);
    assert!((r.lambda1 + 3.935938351350).abs() < 1e-8);
    assert_eq!(r.negative_count, 1);
    assert_eq!(morse_index(&p).unwrap().count, 1);
}

#[test]
fn critical_pitch_on_a_small_square() {
    let d = Domain::square(3.0).unwrap();
    let grid = Grid { nu: 59, nv: 59 };
    let make = |a: f64| SurfaceChart::helicoid(a).map_err(StabilityError::from);
    let r = critical_pitch(make, d, grid, VBoundary::Dirichlet, (1.0, 6.0), 1e-3, &mut |_| {}).unwrap();
    println!("critical on [-3,3]^2: {:.6}", r.estimate);
    assert!(r.hi - r.lo <= 1e-3);
    assert!((r.estimate - 2.242371).abs() < 1e-3);
    for s in &r.steps {
        if s.param <= r.lo {
            assert!(!s.unstable);
        }
        if s.param >= r.hi {
            assert!(s.unstable);
        }
    }
    let err = critical_pitch(make, d, grid, VBoundary::Dirichlet, (0.5, 1.0), 1e-3, &mut |_| {}).unwrap_err();
    assert!(matches!(err, StabilityError::BracketInvalid { .. }));
}
