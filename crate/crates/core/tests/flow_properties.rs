use prequant::flow::{
    energy_drift, flow_jacobian, integrate, observable_evolution_defect, step, symplecticity_defect, HamiltonianSystem,
    IntegratorKind, SeparableSplit,
};
use prequant::{Observable, PhasePoint};
use proptest::prelude::*;

fn obs(text: &str, n: usize) -> Observable {
    Observable::parse(text, n).unwrap()
}

fn oscillator() -> HamiltonianSystem {
    let split = SeparableSplit::new(obs("p1^2/2", 1), obs("q1^2/2", 1)).unwrap();
    HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2", 1)).with_split(&split).unwrap()
}

fn quartic() -> HamiltonianSystem {
    let split = SeparableSplit::new(obs("p1^4/4", 1), obs("q1^4/4", 1)).unwrap();
    HamiltonianSystem::new(&obs("p1^4/4 + q1^4/4", 1)).with_split(&split).unwrap()
}

fn start() -> PhasePoint {
    PhasePoint::new(vec![1.0], vec![0.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn midpoint_steps_are_reversible(q in -2.0f64..2.0, p in -2.0f64..2.0, dt in 1e-4f64..1e-1) {
        let system = quartic();
        let z = PhasePoint::new(vec![q], vec![p]);
        let there = step(&system, &z, dt, IntegratorKind::ImplicitMidpoint).unwrap();
        let back = step(&system, &there, -dt, IntegratorKind::ImplicitMidpoint).unwrap();
        prop_assert!((back.q[0] - q).abs() < 1e-10 && (back.p[0] - p).abs() < 1e-10);
    }

    #[test]
    fn samples_sit_on_the_time_grid(dt in 1e-3f64..1.0, steps in 0usize..50) {
        let traj = integrate(&oscillator(), &start(), dt, steps, IntegratorKind::Rk4).unwrap();
        prop_assert_eq!(traj.len(), steps + 1);
        for (k, t) in traj.times.iter().enumerate() {
            prop_assert_eq!(*t, k as f64 * dt);
        }
        prop_assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn verlet_energy_error_is_bounded() {
    let run = |steps| energy_drift(&integrate(&oscillator(), &start(), 1e-3, steps, IntegratorKind::StormerVerlet).unwrap()).unwrap();
    let short = run(10_000);
    let long = run(100_000);
    assert!(short < 1e-6, "{short:e}");
    assert!(long <= 2.0 * short, "{long:e} vs {short:e}");
}

#[test]
fn midpoint_conserves_quadratic_energy_to_roundoff() {
    // Both drifts are rounding noise, so their ratio carries no information.
    for steps in [10_000, 100_000] {
        let traj = integrate(&oscillator(), &start(), 1e-3, steps, IntegratorKind::ImplicitMidpoint).unwrap();
        assert!(energy_drift(&traj).unwrap() < 1e-12);
    }
}

#[test]
fn flow_maps_are_symplectic() {
    let cases = [
        (oscillator(), IntegratorKind::StormerVerlet),
        (oscillator(), IntegratorKind::ImplicitMidpoint),
        (quartic(), IntegratorKind::ImplicitMidpoint),
        (quartic(), IntegratorKind::StormerVerlet),
    ];
    for (system, kind) in cases {
        let jac = flow_jacobian(&system, &PhasePoint::new(vec![0.7], vec![-0.4]), 1.0, 1e-3, kind).unwrap();
        let defect = symplecticity_defect(&jac);
        assert!(defect < 1e-5, "{kind:?}: {defect:e}");
    }
}

#[test]
fn observable_evolution_converges_quadratically() {
    let q1 = obs("q1", 1);
    let defect = |dt: f64| {
        let steps = (1.0 / dt).round() as usize;
        let traj = integrate(&oscillator(), &start(), dt, steps, IntegratorKind::ImplicitMidpoint).unwrap();
        observable_evolution_defect(&q1, &traj).unwrap()
    };
    let coarse = defect(1e-3);
    let fine = defect(5e-4);
    assert!(coarse < 1e-4);
    let ratio = coarse / fine;
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn conserved_quantities_have_small_evolution_defect() {
    let h = obs("(p1^2 + q1^2)/2", 1);
    let traj = integrate(&oscillator(), &start(), 1e-3, 10_000, IntegratorKind::StormerVerlet).unwrap();
    assert!(observable_evolution_defect(&h, &traj).unwrap() < 1e-6);

    let iso = obs("(p1^2 + p2^2 + q1^2 + q2^2)/2", 2);
    let l = obs("q1*p2 - q2*p1", 2);
    let system = HamiltonianSystem::new(&iso);
    let z0 = PhasePoint::new(vec![1.0, 0.3], vec![-0.2, 0.8]);
    let traj = integrate(&system, &z0, 1e-3, 2_000, IntegratorKind::ImplicitMidpoint).unwrap();
    assert!(observable_evolution_defect(&l, &traj).unwrap() < 1e-6);
}

#[test]
fn trajectories_are_deterministic() {
    let render = || {
        let traj = integrate(&quartic(), &start(), 1e-2, 200, IntegratorKind::ImplicitMidpoint).unwrap();
        let mut out = Vec::new();
        traj.write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(render(), render());
}
