//! The trivial circle bundle `L = R^2n × U(1)` over phase space.
//!
//! Points carry an unwrapped fiber angle θ. The connection form is
//! `α = p·dq + dθ`, whose curvature is ω0. A generator `f` lifts to
//! `V_f = (∂f/∂p, −∂f/∂q, f − p·∂f/∂p)`, the unique field with `π_* V_f = X_f`
//! and `α(V_f) = f`. Along the lifted Hamiltonian flow `θ̇ = −Λ` where
//! `Λ = p·∂H/∂p − H` is the Lagrangian, so `exp(iθ)` picks up the classical
//! action phase of the trajectory.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::expr::{EvalError, Observable};
use crate::flow::{check_integration_args, coordinate_header, fmt_f64, FlowError, HamiltonianSystem, IntegratorKind, Trajectory};
use crate::symplectic::{hamiltonian_vector_field, HamiltonianField, PhasePoint, TangentVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub base: PhasePoint,
    /// Accumulated angle, never wrapped.
    pub theta: f64,
}

impl LiftedPoint {
    pub fn new(base: PhasePoint, theta: f64) -> Self {
        LiftedPoint { base, theta }
    }

    /// θ reduced to `[0, 2π)`.
    pub fn fiber_angle(&self) -> f64 {
        self.theta.rem_euclid(TAU)
    }

    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Same base point and angles differing by a whole number of turns,
    /// up to `tol` in both.
    pub fn fiber_equivalent(&self, other: &LiftedPoint, tol: f64) -> bool {
        let same_base = self
            .base
            .to_flat()
            .iter()
            .zip(other.base.to_flat())
            .all(|(a, b)| (a - b).abs() <= tol);
        let turns = (self.theta - other.theta) / TAU;
        same_base && (turns - turns.round()).abs() * TAU <= tol
    }
}

/// A tangent vector to `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector {
    pub base: TangentVector,
    pub dtheta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedField {
    pub base: HamiltonianField,
    /// `f − Σ p_i ∂f/∂p_i`.
    pub theta_rate: Observable,
}

impl LiftedField {
    pub fn evaluate(&self, z: &PhasePoint) -> Result<LiftedVector, EvalError> {
        Ok(LiftedVector {
            base: self.base.evaluate(z)?,
            dtheta: self.theta_rate.evaluate(z)?,
        })
    }
}

/// `Σ p_i ∂f/∂p_i`
fn momentum_weighted_gradient(f: &Observable) -> Observable {
    let n = f.dim();
    (0..n).fold(Observable::constant(n, 0.0), |acc, i| {
        acc + Observable::p(n, i) * f.d_dp(i)
    })
}

/// `Λ = Σ p_i ∂H/∂p_i − H`.
pub fn lagrangian(h: &Observable) -> Observable {
    (momentum_weighted_gradient(h) - h).simplify()
}

pub fn lift_field(f: &Observable) -> LiftedField {
    LiftedField {
        base: hamiltonian_vector_field(f),
        theta_rate: (f - momentum_weighted_gradient(f)).simplify(),
    }
}

/// `π_* V`: forget the fiber component.
pub fn project(v: &LiftedField) -> HamiltonianField {
    v.base.clone()
}

/// The connection `α = p·dq + dθ` in the global trivialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionForm {
    dim: usize,
}

impl ConnectionForm {
    pub fn new(dim: usize) -> Self {
        ConnectionForm { dim }
    }

    /// Coefficients of the symplectic potential `p·dq` in `(dq, dp)` order.
    pub fn potential(&self) -> Vec<Observable> {
        let n = self.dim;
        (0..n)
            .map(|i| Observable::p(n, i))
            .chain((0..n).map(|_| Observable::constant(n, 0.0)))
            .collect()
    }

    /// Coefficient matrix of `d(p·dq)`: entry `(a, b)` is `∂_a θ_b − ∂_b θ_a`.
    pub fn curvature(&self) -> Vec<Vec<Observable>> {
        let n = self.dim;
        let theta = self.potential();
        let var = |a: usize| {
            if a < n {
                crate::expr::Var::q(a)
            } else {
                crate::expr::Var::p(a - n)
            }
        };
        (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| theta[b].differentiate(var(a)) - theta[a].differentiate(var(b)))
                    .collect()
            })
            .collect()
    }

    /// True if every curvature coefficient is symbolically the constant
    /// entry of ω0.
    pub fn curvature_is_omega(&self) -> bool {
        let omega = crate::flow::omega_matrix(self.dim);
        self.curvature()
            .iter()
            .flatten()
            .zip(omega.iter().flatten())
            .all(|(c, w)| c.constant_value() == Some(*w))
    }

    pub fn pair(&self, at: &LiftedPoint, v: &LiftedVector) -> f64 {
        connection_pairing(v, at)
    }
}

/// `α(v) = p(z)·dq + dθ`.
pub fn connection_pairing(v: &LiftedVector, at: &LiftedPoint) -> f64 {
    assert_eq!(v.base.dim(), at.base.dim(), "vector and point of different dimension");
    let potential: f64 = at.base.p.iter().zip(&v.base.dq).map(|(p, dq)| p * dq).sum();
    potential + v.dtheta
}

#[derive(Debug, Clone)]
pub struct LiftedTrajectory {
    pub base: Trajectory,
    pub thetas: Vec<f64>,
}

impl LiftedTrajectory {
    pub fn point(&self, k: usize) -> LiftedPoint {
        LiftedPoint::new(self.base.points[k].clone(), self.thetas[k])
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Writes `t,q1..qn,p1..pn,theta,phase_re,phase_im,H`.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let n = self.base.generator.dim();
        writeln!(out, "t,{},theta,phase_re,phase_im,H", coordinate_header(n))?;
        for k in 0..self.len() {
            let z = &self.base.points[k];
            let theta = self.thetas[k];
            let phase = Complex64::from_polar(1.0, theta);
            let h = self.base.generator.evaluate(z).unwrap_or(f64::NAN);
            write!(out, "{}", fmt_f64(self.base.times[k]))?;
            for x in z.q.iter().chain(&z.p) {
                write!(out, ",{}", fmt_f64(*x))?;
            }
            writeln!(
                out,
                ",{},{},{},{}",
                fmt_f64(theta),
                fmt_f64(phase.re),
                fmt_f64(phase.im),
                fmt_f64(h)
            )?;
        }
        Ok(())
    }
}

/// Integrates the lifted field `V_H`. The base follows exactly the same
/// steps as [`crate::flow::integrate`]; θ is advanced with the quadrature
/// rule induced by the scheme (RK4 stages, or the step midpoint for the
/// second-order schemes).
pub fn integrate_lifted(
    system: &HamiltonianSystem,
    z0: &LiftedPoint,
    dt: f64,
    steps: usize,
    kind: IntegratorKind,
) -> Result<LiftedTrajectory, FlowError> {
    check_integration_args(&z0.base, system.dim(), dt)?;
    if !z0.theta.is_finite() {
        return Err(FlowError::NonFinite(0.0));
    }
    let rate = lift_field(system.hamiltonian()).theta_rate;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut thetas = Vec::with_capacity(steps + 1);
    let mut state = z0.base.to_flat();
    let mut theta = z0.theta;
    times.push(0.0);
    points.push(z0.base.clone());
    thetas.push(theta);
    for k in 1..=steps {
        let (next, quad) = system.advance(&state, dt, kind)?;
        theta += dt * quad.average(&rate)?;
        state = next;
        let t = k as f64 * dt;
        if !theta.is_finite() || state.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::NonFinite(t));
        }
        times.push(t);
        points.push(PhasePoint::from_flat(&state));
        thetas.push(theta);
    }
    Ok(LiftedTrajectory {
        base: Trajectory {
            generator: system.hamiltonian().clone(),
            dt,
            kind,
            times,
            points,
        },
        thetas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    /// `exp(iθ_final)`
    pub phase: Complex64,
    /// `θ_final − θ_0`
    pub delta_theta: f64,
}

pub fn holonomy_phase(traj: &LiftedTrajectory) -> Holonomy {
    let first = traj.thetas[0];
    let last = *traj.thetas.last().expect("lifted trajectory holds its initial point");
    Holonomy {
        phase: Complex64::from_polar(1.0, last),
        delta_theta: last - first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::SeparableSplit;
    use std::f64::consts::PI;

    fn obs(s: &str, n: usize) -> Observable {
        Observable::parse(s, n).unwrap()
    }

    fn pt(q: f64, p: f64) -> PhasePoint {
        PhasePoint::new(vec![q], vec![p])
    }

    const GRID: [(f64, f64); 4] = [(1.0, 0.0), (0.3, -1.7), (-2.0, 0.5), (1.25, 1.25)];

    #[test]
    fn lagrangian_examples() {
        let osc = lagrangian(&obs("(p1^2 + q1^2)/2", 1));
        let pot = lagrangian(&obs("q1^4 - cos(q1)", 1));
        let free = lagrangian(&obs("p1^2/2", 1));
        for (q, p) in GRID {
            let z = pt(q, p);
            assert!((osc.evaluate(&z).unwrap() - (p * p - q * q) / 2.0).abs() < 1e-15);
            assert_eq!(pot.evaluate(&z).unwrap(), -(q.powi(4) - q.cos()));
            assert!((free.evaluate(&z).unwrap() - p * p / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_lifts_are_distinct() {
        let a = lift_field(&obs("2", 1));
        let b = lift_field(&obs("3", 1));
        assert!(a.base.is_zero() && b.base.is_zero());
        assert_eq!(a.theta_rate.constant_value(), Some(2.0));
        assert_ne!(a, b);
        assert!(project(&a).is_zero());
    }

    #[test]
    fn oscillator_theta_rate_is_minus_lagrangian() {
        let h = obs("(p1^2 + q1^2)/2", 1);
        let v = lift_field(&h);
        let l = lagrangian(&h);
        for (q, p) in GRID {
            let z = pt(q, p);
            let rate = v.theta_rate.evaluate(&z).unwrap();
            assert!((rate - (q * q - p * p) / 2.0).abs() < 1e-15);
            assert!((rate + l.evaluate(&z).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn momentum_lift_has_no_fiber_part() {
        let v = lift_field(&obs("p1", 1));
        assert!(v.theta_rate.is_zero());
        assert_eq!(v.base.dq[0].constant_value(), Some(1.0));
        assert!(v.base.dp[0].is_zero());
    }

    #[test]
    fn connection_examples() {
        let f = obs("q1*p1", 1);
        let at = LiftedPoint::new(pt(2.0, 3.0), 0.4);
        let v = lift_field(&f).evaluate(&at.base).unwrap();
        assert_eq!(connection_pairing(&v, &at), 6.0);

        let fiber = LiftedVector {
            base: TangentVector::new(vec![0.0], vec![0.0]),
            dtheta: 1.0,
        };
        assert_eq!(connection_pairing(&fiber, &at), 1.0);
        let horizontal = LiftedVector {
            base: TangentVector::new(vec![0.7], vec![0.0]),
            dtheta: 0.0,
        };
        assert_eq!(connection_pairing(&horizontal, &LiftedPoint::new(pt(1.0, 0.0), 0.0)), 0.0);
    }

    #[test]
    fn curvature_of_connection_is_omega() {
        for n in 1..=3 {
            assert!(ConnectionForm::new(n).curvature_is_omega());
        }
    }

    #[test]
    fn projection_recovers_hamiltonian_field() {
        let f = obs("q1^2*p1", 1);
        assert_eq!(project(&lift_field(&f)), hamiltonian_vector_field(&f));
    }

    #[test]
    fn free_particle_phase_is_linear() {
        let sys = HamiltonianSystem::new(&obs("p1^2/2", 1));
        let p0 = 1.5;
        for kind in [IntegratorKind::Rk4, IntegratorKind::ImplicitMidpoint] {
            let traj = integrate_lifted(&sys, &LiftedPoint::new(pt(0.0, p0), 0.0), 0.01, 300, kind).unwrap();
            for (t, theta) in traj.base.times.iter().zip(&traj.thetas) {
                assert!((theta + p0 * p0 / 2.0 * t).abs() < 1e-9, "{}", kind.name());
            }
        }
    }

    #[test]
    fn constant_hamiltonian_phase() {
        let c = 2.0;
        let split = SeparableSplit::new(obs("0", 1), obs("2", 1)).unwrap();
        let sys = HamiltonianSystem::new(&obs("2", 1)).with_split(&split).unwrap();
        let steps = 1000;
        let dt = PI / c / steps as f64;
        for kind in IntegratorKind::ALL {
            let traj = integrate_lifted(&sys, &LiftedPoint::new(pt(0.3, -0.2), 0.25), dt, steps, kind).unwrap();
            assert!(traj.base.points.iter().all(|z| *z == pt(0.3, -0.2)));
            for (t, theta) in traj.base.times.iter().zip(&traj.thetas) {
                assert!((theta - (0.25 + c * t)).abs() < 1e-12);
            }
            let zero_start = integrate_lifted(&sys, &LiftedPoint::new(pt(0.3, -0.2), 0.0), dt, steps, kind).unwrap();
            let hol = holonomy_phase(&zero_start);
            assert!((hol.phase - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_length_holonomy() {
        let sys = HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2", 1));
        let traj = integrate_lifted(&sys, &LiftedPoint::new(pt(1.0, 0.0), 0.7), 0.1, 0, IntegratorKind::Rk4).unwrap();
        let hol = holonomy_phase(&traj);
        assert_eq!(hol.phase, Complex64::from_polar(1.0, 0.7));
        assert_eq!(hol.delta_theta, 0.0);
    }

    #[test]
    fn gauge_shift_by_full_turn() {
        let sys = HamiltonianSystem::new(&obs("(p1^2 + q1^2)/2 + q1^3/3", 1));
        let a = integrate_lifted(&sys, &LiftedPoint::new(pt(0.5, 0.1), 0.3), 0.01, 200, IntegratorKind::Rk4).unwrap();
        let b = integrate_lifted(&sys, &LiftedPoint::new(pt(0.5, 0.1), 0.3 + TAU), 0.01, 200, IntegratorKind::Rk4).unwrap();
        for k in 0..a.len() {
            assert!((b.thetas[k] - a.thetas[k] - TAU).abs() < 1e-12);
            assert!(a.point(k).fiber_equivalent(&b.point(k), 1e-12));
        }
        assert!(!a.point(1).fiber_equivalent(&LiftedPoint::new(a.point(1).base, a.thetas[1] + 1.0), 1e-12));
    }

    #[test]
    fn fiber_angle_is_canonical() {
        let z = LiftedPoint::new(pt(0.0, 0.0), -0.5);
        assert!((z.fiber_angle() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(LiftedPoint::new(pt(0.0, 0.0), 7.0 * PI).theta, 7.0 * PI);
    }

    #[test]
    fn csv_has_phase_columns() {
        let sys = HamiltonianSystem::new(&obs("p1^2/2", 1));
        let traj = integrate_lifted(&sys, &LiftedPoint::new(pt(0.0, 1.0), 0.0), 0.5, 1, IntegratorKind::Rk4).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,q1,p1,theta,phase_re,phase_im,H");
        let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row[3], -0.25);
        assert_eq!(row[4], (-0.25f64).cos());
    }
}
