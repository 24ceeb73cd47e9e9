//! Hamiltonian vector fields on `(R^2n, ω0 = Σ dp_i ∧ dq_i)`.
//!
//! Sign conventions used throughout the crate:
//!
//! * `X_f = Σ (∂f/∂p_i ∂/∂q_i − ∂f/∂q_i ∂/∂p_i)`, so that `i_{X_f} ω0 = −df`.
//! * [`poisson_bracket`] is `{f, g} = ω0(X_f, X_g) = Σ (f_p g_q − f_q g_p)`.
//!   With this bracket `[X_f, X_g] = X_{f,g}` and `df/dt = {H, f}` hold as
//!   written.
//! * [`canonical_poisson_bracket`] is the textbook coordinate formula
//!   `Σ (f_q g_p − f_p g_q)`, the negation of the above.

use crate::expr::{EvalError, Observable};

/// A point `(q, p)` of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Self {
        assert_eq!(q.len(), p.len(), "q and p must have the same length");
        PhasePoint { q, p }
    }

    pub fn origin(dim: usize) -> Self {
        PhasePoint::new(vec![0.0; dim], vec![0.0; dim])
    }

    /// Builds a point from `(q1..qn, p1..pn)`.
    pub fn from_flat(state: &[f64]) -> Self {
        assert!(state.len().is_multiple_of(2), "flat state must have even length");
        let (q, p) = state.split_at(state.len() / 2);
        PhasePoint::new(q.to_vec(), p.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }
}

/// A tangent vector `(dq, dp)` at some phase point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
}

impl TangentVector {
    pub fn new(dq: Vec<f64>, dp: Vec<f64>) -> Self {
        assert_eq!(dq.len(), dp.len(), "dq and dp must have the same length");
        TangentVector { dq, dp }
    }

    /// The `k`-th coordinate basis vector in `(q, p)` ordering.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut flat = vec![0.0; 2 * dim];
        flat[k] = 1.0;
        Self::from_flat(&flat)
    }

    pub fn from_flat(v: &[f64]) -> Self {
        let (dq, dp) = v.split_at(v.len() / 2);
        TangentVector::new(dq.to_vec(), dp.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.dq.iter().chain(&self.dp).copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.dq.len()
    }
}

/// `ω0(u, v) = Σ_i (u.dp_i v.dq_i − u.dq_i v.dp_i)`.
pub fn symplectic_product(u: &TangentVector, v: &TangentVector) -> f64 {
    assert_eq!(u.dim(), v.dim(), "tangent vectors of different dimension");
    (0..u.dim())
        .map(|i| u.dp[i] * v.dq[i] - u.dq[i] * v.dp[i])
        .sum()
}

/// A vector field whose components are observables.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub dq: Vec<Observable>,
    pub dp: Vec<Observable>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        VectorField {
            dq: vec![Observable::constant(dim, 0.0); dim],
            dp: vec![Observable::constant(dim, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dq.len()
    }

    pub fn components(&self) -> impl Iterator<Item = &Observable> {
        self.dq.iter().chain(&self.dp)
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Observable::is_zero)
    }

    pub fn evaluate(&self, z: &PhasePoint) -> Result<TangentVector, EvalError> {
        let dq = self.dq.iter().map(|c| c.evaluate(z)).collect::<Result<_, _>>()?;
        let dp = self.dp.iter().map(|c| c.evaluate(z)).collect::<Result<_, _>>()?;
        Ok(TangentVector { dq, dp })
    }

    /// Evaluates at a flat `(q, p)` state into a flat `(dq, dp)` vector.
    pub fn evaluate_flat(&self, state: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (slot, c) in out.iter_mut().zip(self.components()) {
            *slot = c.evaluate_flat(state)?;
        }
        Ok(())
    }

    /// The derivation `X(f) = Σ dq_i ∂f/∂q_i + dp_i ∂f/∂p_i`.
    pub fn apply(&self, f: &Observable) -> Observable {
        assert_eq!(self.dim(), f.dim());
        let mut acc = Observable::constant(f.dim(), 0.0);
        for i in 0..self.dim() {
            acc = acc + &self.dq[i] * f.d_dq(i) + &self.dp[i] * f.d_dp(i);
        }
        acc
    }

    fn map(&self, mut op: impl FnMut(&Observable) -> Observable) -> Self {
        VectorField {
            dq: self.dq.iter().map(&mut op).collect(),
            dp: self.dp.iter().map(&mut op).collect(),
        }
    }

    pub fn simplify(&self) -> Self {
        self.map(Observable::simplify)
    }
}

/// `X_f` together with its generator.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianField {
    pub generator: Observable,
    pub field: VectorField,
}

impl HamiltonianField {
    pub fn dim(&self) -> usize {
        self.field.dim()
    }
}

impl std::ops::Deref for HamiltonianField {
    type Target = VectorField;
    fn deref(&self) -> &VectorField {
        &self.field
    }
}

pub fn hamiltonian_vector_field(f: &Observable) -> HamiltonianField {
    let n = f.dim();
    let field = VectorField {
        dq: (0..n).map(|i| f.d_dp(i)).collect(),
        dp: (0..n).map(|i| -f.d_dq(i)).collect(),
    };
    HamiltonianField {
        generator: f.clone(),
        field,
    }
}

pub fn evaluate_field(x: &VectorField, z: &PhasePoint) -> Result<TangentVector, EvalError> {
    x.evaluate(z)
}

/// `{f, g} = ω0(X_f, X_g) = Σ (∂f/∂p_i ∂g/∂q_i − ∂f/∂q_i ∂g/∂p_i)`.
pub fn poisson_bracket(f: &Observable, g: &Observable) -> Observable {
    assert_eq!(f.dim(), g.dim(), "observables live on different phase spaces");
    let mut acc = Observable::constant(f.dim(), 0.0);
    for i in 0..f.dim() {
        acc = acc + (f.d_dp(i) * g.d_dq(i) - f.d_dq(i) * g.d_dp(i));
    }
    acc.simplify()
}

/// Coordinate formula `Σ (∂f/∂q_i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q_i)`; equals
/// `−poisson_bracket(f, g)`.
pub fn canonical_poisson_bracket(f: &Observable, g: &Observable) -> Observable {
    assert_eq!(f.dim(), g.dim(), "observables live on different phase spaces");
    let mut acc = Observable::constant(f.dim(), 0.0);
    for i in 0..f.dim() {
        acc = acc + (f.d_dq(i) * g.d_dp(i) - f.d_dp(i) * g.d_dq(i));
    }
    acc.simplify()
}

/// Commutator of vector fields, `[X, Y]^a = X(Y^a) − Y(X^a)`.
pub fn field_lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    assert_eq!(x.dim(), y.dim(), "vector fields of different dimension");
    let component = |xa: &Observable, ya: &Observable| x.apply(ya) - y.apply(xa);
    VectorField {
        dq: x.dq.iter().zip(&y.dq).map(|(a, b)| component(a, b)).collect(),
        dp: x.dp.iter().zip(&y.dp).map(|(a, b)| component(a, b)).collect(),
    }
    .simplify()
}

/// Directional derivative `df(v)` at `z`, from the symbolic gradient.
pub fn differential(f: &Observable, z: &PhasePoint, v: &TangentVector) -> Result<f64, EvalError> {
    let mut acc = 0.0;
    for i in 0..f.dim() {
        acc += f.d_dq(i).evaluate(z)? * v.dq[i] + f.d_dp(i).evaluate(z)? * v.dp[i];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(s: &str, n: usize) -> Observable {
        Observable::parse(s, n).unwrap()
    }

    #[test]
    fn oscillator_field() {
        let x = hamiltonian_vector_field(&obs("(p1^2 + q1^2)/2", 1));
        let v = x.evaluate(&PhasePoint::new(vec![1.0], vec![0.0])).unwrap();
        assert_eq!(v, TangentVector::new(vec![0.0], vec![-1.0]));
        let z = PhasePoint::new(vec![0.3], vec![-0.7]);
        assert_eq!(x.dq[0].evaluate(&z).unwrap(), -0.7);
        assert_eq!(x.dp[0].evaluate(&z).unwrap(), -0.3);
    }

    #[test]
    fn position_and_constant_fields() {
        let x = hamiltonian_vector_field(&obs("q1", 1));
        assert!(x.dq[0].is_zero());
        assert_eq!(x.dp[0].constant_value(), Some(-1.0));
        assert!(hamiltonian_vector_field(&obs("3.5", 2)).is_zero());
        let zero = VectorField::zero(1).evaluate(&PhasePoint::new(vec![5.0], vec![2.0])).unwrap();
        assert_eq!(zero, TangentVector::new(vec![0.0], vec![0.0]));
    }

    #[test]
    fn free_particle_field() {
        let x = hamiltonian_vector_field(&obs("p1^2/2", 1));
        let v = evaluate_field(&x, &PhasePoint::new(vec![0.0], vec![3.0])).unwrap();
        assert_eq!(v, TangentVector::new(vec![3.0], vec![0.0]));
    }

    #[test]
    fn symplectic_product_examples() {
        let dq = TangentVector::basis(1, 0);
        let dp = TangentVector::basis(1, 1);
        assert_eq!(symplectic_product(&dq, &dp), -1.0);
        assert_eq!(symplectic_product(&dp, &dq), 1.0);
        let u = TangentVector::new(vec![0.3, -2.0], vec![1.5, 0.25]);
        let v = TangentVector::new(vec![-1.0, 0.5], vec![0.125, 4.0]);
        assert_eq!(symplectic_product(&u, &u), 0.0);
        assert_eq!(symplectic_product(&u, &v), -symplectic_product(&v, &u));
    }

    #[test]
    fn bracket_examples() {
        let q = obs("q1", 1);
        let p = obs("p1", 1);
        assert_eq!(poisson_bracket(&q, &p).constant_value(), Some(-1.0));
        assert_eq!(canonical_poisson_bracket(&q, &p).constant_value(), Some(1.0));
        let f = obs("q1^3*p1 + sin(q1*p1)", 1);
        assert!(poisson_bracket(&f, &f).is_zero());
        assert!(canonical_poisson_bracket(&f, &f).is_zero());

        let q2 = obs("q1^2", 1);
        let p2 = obs("p1^2", 1);
        let omega = poisson_bracket(&q2, &p2);
        let canon = canonical_poisson_bracket(&q2, &p2);
        for (x, y) in [(1.0, 2.0), (-0.5, 3.0), (0.7, -1.1)] {
            let z = PhasePoint::new(vec![x], vec![y]);
            assert_eq!(omega.evaluate(&z).unwrap(), -4.0 * x * y);
            assert_eq!(canon.evaluate(&z).unwrap(), 4.0 * x * y);
        }
    }

    #[test]
    fn lie_bracket_examples() {
        let xf = hamiltonian_vector_field(&obs("q1^2", 1));
        let xg = hamiltonian_vector_field(&obs("p1^2", 1));
        let b = field_lie_bracket(&xf, &xg);
        for (x, y) in [(1.0, 2.0), (-0.5, 3.0)] {
            let z = PhasePoint::new(vec![x], vec![y]);
            assert_eq!(b.evaluate(&z).unwrap(), TangentVector::new(vec![-4.0 * x], vec![4.0 * y]));
        }
        assert!(field_lie_bracket(&xf, &xf).is_zero());
        let xq = hamiltonian_vector_field(&obs("q1", 1));
        let xp = hamiltonian_vector_field(&obs("p1", 1));
        assert!(field_lie_bracket(&xq, &xp).is_zero());
    }

    #[test]
    fn field_pairs_with_omega_to_minus_df() {
        let f = obs("q1^2*p2 - cos(p1) + q2*p1^3", 2);
        let x = hamiltonian_vector_field(&f);
        let z = PhasePoint::new(vec![0.4, -1.3], vec![0.9, 2.2]);
        let xz = x.evaluate(&z).unwrap();
        for k in 0..4 {
            let e = TangentVector::basis(2, k);
            let lhs = symplectic_product(&xz, &e);
            let rhs = -differential(&f, &z, &e).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12, "basis {k}: {lhs} vs {rhs}");
        }
    }
}
