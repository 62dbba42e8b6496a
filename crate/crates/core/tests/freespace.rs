use dipole_memory::cavity::{simulate_adiabatic, CavityParams, CavityState};
use dipole_memory::freespace::{
    analytic_evolution, entire_bessel_kernel, numeric_evolution, storage_retrieval_sweep,
    BesselOrder, FreeSpaceScenario, MediumParams, Solver, SpatialGrid, SpinWave,
};
use dipole_memory::schedules::{FieldEnvelope, Schedule, Segment, TimeGrid};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Five-point central difference.
fn derivative(f: impl Fn(f64) -> f64, a: f64, h: f64) -> f64 {
    (f(a - 2.0 * h) - 8.0 * f(a - h) + 8.0 * f(a + h) - f(a + 2.0 * h)) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn kernel_derivative_is_the_next_kernel(a in -20.0..20.0f64) {
        let k0 = |x: f64| entire_bessel_kernel(BesselOrder::Zero, x);
        let k1 = entire_bessel_kernel(BesselOrder::One, a);
        let d = derivative(k0, a, 1e-3);
        prop_assert!((d - k1).abs() <= 1e-10 * k1.abs().max(1.0), "a = {}: {} vs {}", a, d, k1);
    }
}

#[test]
fn analytic_and_numeric_agree_on_random_problems() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let gamma = rng.gen_range(0.0..0.2);
        let medium = MediumParams::with_light_speed(1.0, gamma, 1.0).unwrap();
        let grid = TimeGrid::with_points(-3.0, 3.0, 200).unwrap();
        let input =
            FieldEnvelope::gaussian(grid, rng.gen_range(-0.5..0.5), rng.gen_range(0.4..0.8))
                .unwrap();
        let g = Schedule::coupling(vec![Segment::gaussian(
            -3.0,
            3.0,
            rng.gen_range(0.3..0.8),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(0.8..1.5),
        )])
        .unwrap();
        let wave = SpinWave::zeros(SpatialGrid::new(1.0, 200).unwrap());
        let a = analytic_evolution(&input, &wave, &g, &Schedule::zero(), &medium).unwrap();
        let n = numeric_evolution(&input, &wave, &g, &Schedule::zero(), &medium).unwrap();
        let diff = a.max_relative_difference(&n);
        assert!(diff < 1e-3, "relative discrepancy {diff}");
    }
}

#[test]
fn thin_medium_reduces_to_the_cavity() {
    // g^2 L / (2c) plays the role of g^2 / kappa.
    let (length, g_peak) = (1e-3, 10.0);
    let grid = TimeGrid::with_points(-3.0, 3.0, 2001).unwrap();
    let input = FieldEnvelope::gaussian(grid, 0.0, 0.6).unwrap();
    let g = Schedule::coupling(vec![Segment::gaussian(-3.0, 3.0, g_peak, 0.3, 1.2)]).unwrap();
    let medium = MediumParams::with_light_speed(length, 0.0, 1.0).unwrap();
    let wave = SpinWave::zeros(SpatialGrid::new(length, 101).unwrap());
    let f = numeric_evolution(&input, &wave, &g, &Schedule::zero(), &medium).unwrap();
    let l = f.ledger();
    let free = l.stored[l.stored.len() - 1] / l.input[l.input.len() - 1];

    let p = CavityParams::new(1.0, 0.0).unwrap();
    let gc = g.scaled((0.5 * length).sqrt()).unwrap();
    let r = simulate_adiabatic(&input, &gc, &Schedule::zero(), &p, CavityState::default()).unwrap();
    let cavity = r.efficiencies.eta_w.unwrap();
    assert!(free > 0.1);
    assert!((free - cavity).abs() < 0.02 * cavity, "{free} vs {cavity}");
}

#[test]
fn doubling_the_input_doubles_the_output_exactly() {
    let medium = MediumParams::with_light_speed(1.0, 0.1, 1.0).unwrap();
    let grid = TimeGrid::with_points(-3.0, 3.0, 150).unwrap();
    let e = FieldEnvelope::gaussian(grid, 0.0, 0.6).unwrap();
    let g = Schedule::coupling(vec![Segment::gaussian(-3.0, 3.0, 0.6, 0.0, 1.0)]).unwrap();
    let wave = SpinWave::zeros(SpatialGrid::new(1.0, 80).unwrap());
    let run =
        |e: &FieldEnvelope| numeric_evolution(e, &wave, &g, &Schedule::zero(), &medium).unwrap();
    let (a, b) = (run(&e), run(&e.scaled(C64::new(2.0, 0.0))));
    for (x, y) in a.output().samples().iter().zip(b.output().samples()) {
        assert_eq!(x * 2.0, *y);
    }
}

#[test]
fn zero_coupling_leaves_the_medium_transparent() {
    let medium = MediumParams::with_light_speed(1.0, 0.0, 1.0).unwrap();
    let grid = TimeGrid::with_points(-2.0, 2.0, 101).unwrap();
    let e = FieldEnvelope::gaussian(grid, 0.0, 0.5).unwrap();
    let zgrid = SpatialGrid::new(1.0, 51).unwrap();
    let s0: Vec<C64> = zgrid.positions().map(|z| C64::new(z.sin(), 0.0)).collect();
    let wave = SpinWave::new(zgrid, s0.clone()).unwrap();
    for f in [analytic_evolution, numeric_evolution] {
        let r = f(&e, &wave, &Schedule::zero(), &Schedule::zero(), &medium).unwrap();
        assert_eq!(r.output().samples(), e.samples());
        assert_eq!(r.spin_wave(grid.len() - 1).samples(), &s0[..]);
    }
}

#[test]
fn zero_depth_retrieves_nothing_with_either_solver() {
    let grid = TimeGrid::with_points(-3.0, 3.0, 121).unwrap();
    for solver in [Solver::Numeric, Solver::Analytic] {
        let s = FreeSpaceScenario {
            medium: MediumParams::with_light_speed(1.0, 0.1, 1.0).unwrap(),
            input: FieldEnvelope::gaussian(grid, 0.0, 0.6).unwrap(),
            coupling: Schedule::coupling(vec![Segment::gaussian(-3.0, 3.0, 1.0, 0.0, 1.0)])
                .unwrap(),
            delta: Schedule::zero(),
            nz: 40,
            solver,
        };
        let rows = storage_retrieval_sweep(&s, &[0.0, 1.0]).unwrap();
        assert_eq!(rows[0].eta_forward, 0.0);
        assert_eq!(rows[0].eta_backward, 0.0);
        assert!(rows[1].eta_backward > 0.0);
    }
}
