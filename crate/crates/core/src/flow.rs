//! Fixed-step integration of Hamilton's equations with conservation and
//! symplecticity diagnostics.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Observable};
use crate::symplectic::{hamiltonian_vector_field, poisson_bracket, HamiltonianField, PhasePoint};

/// Fixed-point tolerance for the implicit midpoint stage equation.
pub const MIDPOINT_TOLERANCE: f64 = 1e-12;
pub const MIDPOINT_MAX_ITERATIONS: usize = 50;
/// Relative finite-difference perturbation for [`flow_jacobian`].
pub const JACOBIAN_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Störmer-Verlet needs a separable split: {0}")]
    NonSeparable(String),
    #[error("implicit midpoint did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    Rk4,
    #[serde(alias = "verlet")]
    StormerVerlet,
    #[default]
    #[serde(alias = "midpoint")]
    ImplicitMidpoint,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 3] = [
        IntegratorKind::Rk4,
        IntegratorKind::StormerVerlet,
        IntegratorKind::ImplicitMidpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegratorKind::Rk4 => "rk4",
            IntegratorKind::StormerVerlet => "stormer_verlet",
            IntegratorKind::ImplicitMidpoint => "implicit_midpoint",
        }
    }

    pub fn is_symplectic(self) -> bool {
        !matches!(self, IntegratorKind::Rk4)
    }
}

/// Declared decomposition `H = T(p) + V(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableSplit {
    kinetic: Observable,
    potential: Observable,
}

impl SeparableSplit {
    pub fn new(kinetic: Observable, potential: Observable) -> Result<Self, FlowError> {
        if kinetic.dim() != potential.dim() {
            return Err(FlowError::NonSeparable("T and V have different dimensions".into()));
        }
        if kinetic.depends_on_q() {
            return Err(FlowError::NonSeparable(format!("kinetic part `{}` depends on q", kinetic)));
        }
        if potential.depends_on_p() {
            return Err(FlowError::NonSeparable(format!("potential part `{}` depends on p", potential)));
        }
        Ok(SeparableSplit { kinetic, potential })
    }

    pub fn kinetic(&self) -> &Observable {
        &self.kinetic
    }

    pub fn potential(&self) -> &Observable {
        &self.potential
    }
}

#[derive(Debug, Clone)]
struct SplitGradients {
    // ∂T/∂p_i
    velocity: Vec<Observable>,
    // ∂V/∂q_i
    force: Vec<Observable>,
}

/// Weighted nodes `Σ w_i g(y_i) / denominator` approximating the step
/// average of `g`.
#[derive(Debug, Clone)]
pub(crate) struct StepQuadrature {
    pub denominator: f64,
    pub nodes: Vec<(f64, Vec<f64>)>,
}

impl StepQuadrature {
    fn single(point: Vec<f64>) -> Self {
        StepQuadrature {
            denominator: 1.0,
            nodes: vec![(1.0, point)],
        }
    }

    pub fn average(&self, g: &Observable) -> Result<f64, EvalError> {
        let mut acc = 0.0;
        for (w, y) in &self.nodes {
            acc += w * g.evaluate_flat(y)?;
        }
        Ok(acc / self.denominator)
    }
}

/// A Hamiltonian with its precomputed vector field and optional split.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    field: HamiltonianField,
    split: Option<SplitGradients>,
}

impl HamiltonianSystem {
    pub fn new(hamiltonian: &Observable) -> Self {
        HamiltonianSystem {
            field: hamiltonian_vector_field(hamiltonian),
            split: None,
        }
    }

    /// Attaches a separable split. The split must agree with `H` at a fixed
    /// set of probe points.
    pub fn with_split(mut self, split: &SeparableSplit) -> Result<Self, FlowError> {
        let n = self.dim();
        if split.kinetic.dim() != n {
            return Err(FlowError::NonSeparable("split dimension differs from H".into()));
        }
        let h = self.hamiltonian().clone();
        for k in 0..5 {
            let probe: Vec<f64> = (0..2 * n)
                .map(|i| 0.37 * (k as f64 + 1.0) - 0.61 * i as f64)
                .collect();
            let z = PhasePoint::from_flat(&probe);
            let (Ok(hv), Ok(t), Ok(v)) = (h.evaluate(&z), split.kinetic.evaluate(&z), split.potential.evaluate(&z)) else {
                continue;
            };
            if (hv - (t + v)).abs() > 1e-9 * hv.abs().max(1.0) {
                return Err(FlowError::NonSeparable(format!(
                    "H differs from T + V at {:?}",
                    probe
                )));
            }
        }
        self.split = Some(SplitGradients {
            velocity: (0..n).map(|i| split.kinetic.d_dp(i)).collect(),
            force: (0..n).map(|i| split.potential.d_dq(i)).collect(),
        });
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &Observable {
        &self.field.generator
    }

    pub fn field(&self) -> &HamiltonianField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn is_separable(&self) -> bool {
        self.split.is_some()
    }

    fn rhs(&self, state: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        self.field.evaluate_flat(state, out)
    }

    /// Advances `state` by `dt`, also returning the quadrature rule the scheme
    /// induces for `∫ g(z(t)) dt` over the step.
    pub(crate) fn advance(
        &self,
        state: &[f64],
        dt: f64,
        kind: IntegratorKind,
    ) -> Result<(Vec<f64>, StepQuadrature), FlowError> {
        if !dt.is_finite() || dt == 0.0 {
            return Err(FlowError::InvalidStep(format!("dt = {dt}")));
        }
        match kind {
            IntegratorKind::Rk4 => self.rk4(state, dt),
            IntegratorKind::StormerVerlet => self.verlet(state, dt),
            IntegratorKind::ImplicitMidpoint => self.midpoint(state, dt),
        }
    }

    fn rk4(&self, z: &[f64], dt: f64) -> Result<(Vec<f64>, StepQuadrature), FlowError> {
        let m = z.len();
        let offset = |k: &[f64], h: f64| -> Vec<f64> { z.iter().zip(k).map(|(a, b)| a + h * b).collect() };
        let mut k1 = vec![0.0; m];
        let mut k2 = vec![0.0; m];
        let mut k3 = vec![0.0; m];
        let mut k4 = vec![0.0; m];
        self.rhs(z, &mut k1)?;
        let y2 = offset(&k1, 0.5 * dt);
        self.rhs(&y2, &mut k2)?;
        let y3 = offset(&k2, 0.5 * dt);
        self.rhs(&y3, &mut k3)?;
        let y4 = offset(&k3, dt);
        self.rhs(&y4, &mut k4)?;
        let next = (0..m)
            .map(|i| z[i] + dt * ((k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0))
            .collect();
        let quad = StepQuadrature {
            denominator: 6.0,
            nodes: vec![(1.0, z.to_vec()), (2.0, y2), (2.0, y3), (1.0, y4)],
        };
        Ok((next, quad))
    }

    fn verlet(&self, z: &[f64], dt: f64) -> Result<(Vec<f64>, StepQuadrature), FlowError> {
        let split = self.split.as_ref().ok_or_else(|| {
            FlowError::NonSeparable("no T(p) + V(q) split declared for this Hamiltonian".into())
        })?;
        let n = self.dim();
        let mut next = z.to_vec();
        // kick
        for i in 0..n {
            next[n + i] = z[n + i] - 0.5 * dt * split.force[i].evaluate_flat(z)?;
        }
        // drift
        let half = next.clone();
        for i in 0..n {
            next[i] = z[i] + dt * split.velocity[i].evaluate_flat(&half)?;
        }
        // kick
        let drifted = next.clone();
        for i in 0..n {
            next[n + i] = drifted[n + i] - 0.5 * dt * split.force[i].evaluate_flat(&drifted)?;
        }
        let mid = z.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        Ok((next, StepQuadrature::single(mid)))
    }

    fn midpoint(&self, z: &[f64], dt: f64) -> Result<(Vec<f64>, StepQuadrature), FlowError> {
        let m = z.len();
        let mut slope = vec![0.0; m];
        self.rhs(z, &mut slope)?;
        let mut guess: Vec<f64> = z.iter().zip(&slope).map(|(a, b)| a + dt * b).collect();
        let scale = z.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        let mut mid = vec![0.0; m];
        let mut residual = f64::INFINITY;
        for _ in 0..MIDPOINT_MAX_ITERATIONS {
            for i in 0..m {
                mid[i] = 0.5 * (z[i] + guess[i]);
            }
            self.rhs(&mid, &mut slope)?;
            residual = 0.0;
            for i in 0..m {
                let updated = z[i] + dt * slope[i];
                residual = residual.max((updated - guess[i]).abs());
                guess[i] = updated;
            }
            if !residual.is_finite() {
                break;
            }
            if residual <= MIDPOINT_TOLERANCE * scale {
                for i in 0..m {
                    mid[i] = 0.5 * (z[i] + guess[i]);
                }
                return Ok((guess, StepQuadrature::single(mid)));
            }
        }
        Err(FlowError::NoConvergence {
            iterations: MIDPOINT_MAX_ITERATIONS,
            residual,
        })
    }
}

/// One step of the named scheme. Negative `dt` steps backwards in time.
pub fn step(
    system: &HamiltonianSystem,
    z: &PhasePoint,
    dt: f64,
    kind: IntegratorKind,
) -> Result<PhasePoint, FlowError> {
    let (next, _) = system.advance(&z.to_flat(), dt, kind)?;
    Ok(PhasePoint::from_flat(&next))
}

/// Uniformly sampled solution of Hamilton's equations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub generator: Observable,
    pub dt: f64,
    pub kind: IntegratorKind,
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory always holds its initial point")
    }

    /// Writes `t,q1..qn,p1..pn,H` with 17 significant digits.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let n = self.generator.dim();
        writeln!(out, "t,{},H", coordinate_header(n))?;
        for (t, z) in self.times.iter().zip(&self.points) {
            let h = self.generator.evaluate(z).unwrap_or(f64::NAN);
            write!(out, "{}", fmt_f64(*t))?;
            for x in z.q.iter().chain(&z.p) {
                write!(out, ",{}", fmt_f64(*x))?;
            }
            writeln!(out, ",{}", fmt_f64(h))?;
        }
        Ok(())
    }
}

pub(crate) fn coordinate_header(n: usize) -> String {
    let qs = (1..=n).map(|i| format!("q{i}"));
    let ps = (1..=n).map(|i| format!("p{i}"));
    qs.chain(ps).collect::<Vec<_>>().join(",")
}

/// Scientific notation with 17 significant digits (lossless for f64).
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

pub(crate) fn check_integration_args(z0: &PhasePoint, dim: usize, dt: f64) -> Result<(), FlowError> {
    if z0.dim() != dim {
        return Err(FlowError::InvalidStep(format!(
            "initial point has dimension {}, Hamiltonian has {}",
            z0.dim(),
            dim
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    if !z0.is_finite() {
        return Err(FlowError::NonFinite(0.0));
    }
    Ok(())
}

pub fn integrate(
    system: &HamiltonianSystem,
    z0: &PhasePoint,
    dt: f64,
    steps: usize,
    kind: IntegratorKind,
) -> Result<Trajectory, FlowError> {
    check_integration_args(z0, system.dim(), dt)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut state = z0.to_flat();
    times.push(0.0);
    points.push(z0.clone());
    for k in 1..=steps {
        state = system.advance(&state, dt, kind)?.0;
        let t = k as f64 * dt;
        if state.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::NonFinite(t));
        }
        times.push(t);
        points.push(PhasePoint::from_flat(&state));
    }
    Ok(Trajectory {
        generator: system.hamiltonian().clone(),
        dt,
        kind,
        times,
        points,
    })
}

/// `max_k |H(z_k) − H(z_0)|`.
pub fn energy_drift(traj: &Trajectory) -> Result<f64, EvalError> {
    let h0 = traj.generator.evaluate(&traj.points[0])?;
    traj.points.iter().try_fold(0.0_f64, |worst, z| {
        Ok(worst.max((traj.generator.evaluate(z)? - h0).abs()))
    })
}

/// Central-difference Jacobian of the time-`duration` flow map, `(q, p)`
/// ordering, `J[i][j] = ∂φ_i/∂z_j`.
pub fn flow_jacobian(
    system: &HamiltonianSystem,
    z0: &PhasePoint,
    duration: f64,
    dt: f64,
    kind: IntegratorKind,
) -> Result<Vec<Vec<f64>>, FlowError> {
    check_integration_args(z0, system.dim(), dt)?;
    let steps_f = (duration / dt).round();
    if duration < 0.0 || (steps_f * dt - duration).abs() > 1e-9 * duration.max(1.0) {
        return Err(FlowError::InvalidStep(format!(
            "duration {duration} is not a non-negative multiple of dt {dt}"
        )));
    }
    let steps = steps_f as usize;
    let m = 2 * system.dim();
    let mut jac = vec![vec![0.0; m]; m];
    if steps == 0 {
        for (i, row) in jac.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return Ok(jac);
    }
    let base = z0.to_flat();
    let flow = |start: Vec<f64>| -> Result<Vec<f64>, FlowError> {
        let mut state = start;
        for _ in 0..steps {
            state = system.advance(&state, dt, kind)?.0;
        }
        Ok(state)
    };
    for j in 0..m {
        let eps = JACOBIAN_EPSILON * base[j].abs().max(1.0);
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += eps;
        minus[j] -= eps;
        let width = plus[j] - minus[j];
        let fp = flow(plus)?;
        let fm = flow(minus)?;
        for i in 0..m {
            jac[i][j] = (fp[i] - fm[i]) / width;
        }
    }
    Ok(jac)
}

/// Matrix of ω0 in `(q, p)` ordering: `[[0, −I], [I, 0]]`.
pub fn omega_matrix(dim: usize) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; 2 * dim]; 2 * dim];
    for i in 0..dim {
        w[i][dim + i] = -1.0;
        w[dim + i][i] = 1.0;
    }
    w
}

/// `‖Jᵀ Ω0 J − Ω0‖_max`.
pub fn symplecticity_defect(jac: &[Vec<f64>]) -> f64 {
    let m = jac.len();
    assert!(m.is_multiple_of(2) && jac.iter().all(|r| r.len() == m), "Jacobian must be 2n x 2n");
    let w = omega_matrix(m / 2);
    let mut worst = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    acc += jac[i][a] * w[i][j] * jac[j][b];
                }
            }
            worst = worst.max((acc - w[a][b]).abs());
        }
    }
    worst
}

/// `max_k |(f(z_{k+1}) − f(z_{k−1}))/(2dt) − {H, f}(z_k)|` over interior samples.
pub fn observable_evolution_defect(f: &Observable, traj: &Trajectory) -> Result<f64, EvalError> {
    let rate = poisson_bracket(&traj.generator, f);
    let values = traj
        .points
        .iter()
        .map(|z| f.evaluate(z))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = 0.0_f64;
    for k in 1..values.len().saturating_sub(1) {
        let fd = (values[k + 1] - values[k - 1]) / (2.0 * traj.dt);
        worst = worst.max((fd - rate.evaluate(&traj.points[k])?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn obs(s: &str, n: usize) -> Observable {
        Observable::parse(s, n).unwrap()
    }

    fn oscillator() -> HamiltonianSystem {
        let split = SeparableSplit::new(obs("p1^2/2", 1), obs("q1^2/2", 1)).unwrap();
        HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2", 1)).with_split(&split).unwrap()
    }

    fn at(q: f64, p: f64) -> PhasePoint {
        PhasePoint::new(vec![q], vec![p])
    }

    #[test]
    fn constant_velocity_is_exact_for_every_scheme() {
        let split = SeparableSplit::new(obs("p1", 1), obs("0", 1)).unwrap();
        let sys = HamiltonianSystem::new(&obs("p1", 1)).with_split(&split).unwrap();
        for kind in IntegratorKind::ALL {
            let z = step(&sys, &at(0.0, 0.0), 0.1, kind).unwrap();
            assert_eq!(z, at(0.1, 0.0), "{}", kind.name());
        }
    }

    #[test]
    fn zero_steps_returns_initial_point() {
        let traj = integrate(&oscillator(), &at(1.0, 0.0), 0.1, 0, IntegratorKind::Rk4).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(energy_drift(&traj).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_closes_the_oscillator_orbit() {
        let dt = 2.0 * PI / 1e4;
        let traj = integrate(&oscillator(), &at(1.0, 0.0), dt, 10_000, IntegratorKind::ImplicitMidpoint).unwrap();
        let end = traj.last();
        assert!((end.q[0] - 1.0).abs() < 1e-6 && end.p[0].abs() < 1e-6, "{end:?}");
        assert_eq!(traj.len(), 10_001);
        assert_eq!(traj.times[10_000], 10_000.0 * dt);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn verlet_requires_split() {
        let sys = HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2", 1));
        assert!(matches!(
            step(&sys, &at(1.0, 0.0), 0.1, IntegratorKind::StormerVerlet),
            Err(FlowError::NonSeparable(_))
        ));
        assert!(matches!(
            SeparableSplit::new(obs("p1^2/2 + q1", 1), obs("q1^2/2", 1)),
            Err(FlowError::NonSeparable(_))
        ));
        assert!(matches!(
            SeparableSplit::new(obs("p1^2/2", 1), obs("q1^2/2 + p1", 1)),
            Err(FlowError::NonSeparable(_))
        ));
        let wrong = SeparableSplit::new(obs("p1^2", 1), obs("q1^2/2", 1)).unwrap();
        assert!(matches!(sys.with_split(&wrong), Err(FlowError::NonSeparable(_))));
    }

    #[test]
    fn midpoint_reports_non_convergence() {
        // Stiff enough that the fixed-point map is not a contraction.
        let sys = HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2", 1));
        let err = step(&sys, &at(1.0, 0.0), 50.0, IntegratorKind::ImplicitMidpoint).unwrap_err();
        assert!(matches!(err, FlowError::NoConvergence { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let sys = oscillator();
        assert!(integrate(&sys, &at(1.0, 0.0), 0.0, 3, IntegratorKind::Rk4).is_err());
        assert!(integrate(&sys, &at(1.0, 0.0), -0.1, 3, IntegratorKind::Rk4).is_err());
        let z2 = PhasePoint::new(vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!(integrate(&sys, &z2, 0.1, 3, IntegratorKind::Rk4).is_err());
        assert!(flow_jacobian(&sys, &at(1.0, 0.0), 0.15, 0.1, IntegratorKind::Rk4).is_err());
    }

    #[test]
    fn linear_flow_has_no_energy_drift() {
        let sys = HamiltonianSystem::new(&obs("p1", 1));
        let traj = integrate(&sys, &at(0.3, 2.0), 0.01, 500, IntegratorKind::Rk4).unwrap();
        assert_eq!(energy_drift(&traj).unwrap(), 0.0);
    }

    #[test]
    fn verlet_energy_drift_is_small() {
        let traj = integrate(&oscillator(), &at(1.0, 0.0), 1e-3, 10_000, IntegratorKind::StormerVerlet).unwrap();
        assert!(energy_drift(&traj).unwrap() < 1e-6);
    }

    #[test]
    fn rk4_drift_grows_secularly_where_verlet_stays_bounded() {
        // At dt = 1e-3 both drifts sit near roundoff, so the comparison uses a
        // coarse step where the RK4 amplitude decay is visible.
        let sys = oscillator();
        let dt = 0.2;
        let drift = |kind, steps| {
            energy_drift(&integrate(&sys, &at(1.0, 0.0), dt, steps, kind).unwrap()).unwrap()
        };
        let rk_short = drift(IntegratorKind::Rk4, 10_000);
        let rk_long = drift(IntegratorKind::Rk4, 100_000);
        let verlet_short = drift(IntegratorKind::StormerVerlet, 10_000);
        let verlet_long = drift(IntegratorKind::StormerVerlet, 100_000);
        assert!(rk_long > 5.0 * rk_short, "rk4 {rk_short} -> {rk_long}");
        assert!(verlet_long <= 2.0 * verlet_short, "verlet {verlet_short} -> {verlet_long}");
        assert!(rk_long > verlet_long);
    }

    #[test]
    fn jacobian_examples() {
        let sys = oscillator();
        let id = flow_jacobian(&sys, &at(0.4, -0.2), 0.0, 1e-3, IntegratorKind::Rk4).unwrap();
        assert_eq!(id, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let dt = 2.0 * PI / 10_000.0;
        let mono = flow_jacobian(&sys, &at(1.0, 0.0), 2.0 * PI, dt, IntegratorKind::Rk4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((mono[i][j] - expected).abs() < 1e-5, "{mono:?}");
            }
        }

        let free = HamiltonianSystem::new(&obs("p1^2/2", 1));
        let shear = flow_jacobian(&free, &at(0.5, 1.5), 1.0, 1e-3, IntegratorKind::ImplicitMidpoint).unwrap();
        let expected = [[1.0, 1.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((shear[i][j] - expected[i][j]).abs() < 1e-5, "{shear:?}");
            }
        }
    }

    #[test]
    fn symplecticity_defect_examples() {
        assert_eq!(symplecticity_defect(&[vec![1.0, 0.0], vec![0.0, 1.0]]), 0.0);
        assert_eq!(symplecticity_defect(&omega_matrix(2)), 0.0);
        assert_eq!(symplecticity_defect(&[vec![2.0, 0.0], vec![0.0, 1.0]]), 1.0);
    }

    #[test]
    fn midpoint_is_reversible() {
        let sys = HamiltonianSystem::new(&obs("p1^4/4 + q1^4/4 + q1*p1^2", 1));
        let z0 = at(0.7, -0.4);
        let fwd = step(&sys, &z0, 0.05, IntegratorKind::ImplicitMidpoint).unwrap();
        let back = step(&sys, &fwd, -0.05, IntegratorKind::ImplicitMidpoint).unwrap();
        assert!((back.q[0] - z0.q[0]).abs() < 1e-10 && (back.p[0] - z0.p[0]).abs() < 1e-10);
    }

    #[test]
    fn evolution_defect_examples() {
        let sys = oscillator();
        let traj = integrate(&sys, &at(1.0, 0.0), 1e-3, 2000, IntegratorKind::StormerVerlet).unwrap();
        assert!(observable_evolution_defect(sys.hamiltonian(), &traj).unwrap() < 1e-6);

        let q = obs("q1", 1);
        let mid = integrate(&sys, &at(1.0, 0.0), 1e-3, 2000, IntegratorKind::ImplicitMidpoint).unwrap();
        assert!(observable_evolution_defect(&q, &mid).unwrap() < 1e-4);

        let iso = HamiltonianSystem::new(&obs("(p1^2 + p2^2 + q1^2 + q2^2)/2", 2));
        let angular = obs("q1*p2 - q2*p1", 2);
        let bracket = poisson_bracket(iso.hamiltonian(), &angular);
        let z = PhasePoint::new(vec![0.3, -1.2], vec![0.8, 0.5]);
        assert_eq!(bracket.evaluate(&z).unwrap(), 0.0);
        let traj = integrate(&iso, &z, 1e-3, 2000, IntegratorKind::ImplicitMidpoint).unwrap();
        assert!(observable_evolution_defect(&angular, &traj).unwrap() < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let traj = integrate(&oscillator(), &at(1.0, 0.0), 0.5, 2, IntegratorKind::Rk4).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,q1,p1,H");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,5.0000000000000000e-1");
        let last: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(last[1], traj.last().q[0]);
    }
}
