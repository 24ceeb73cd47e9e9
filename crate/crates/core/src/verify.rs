//! Invariant suites run against a [`Scenario`], producing a machine-readable
//! report of named checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{self, dirac_corpus, gaussian_sections, random_polynomial, sample_points};
use crate::expr::{EvalError, Observable, Var};
use crate::flow::{
    energy_drift, flow_jacobian, integrate, observable_evolution_defect, step, symplecticity_defect, FlowError,
    IntegratorKind,
};
use crate::lift::{connection_pairing, integrate_lifted, lift_field, project, ConnectionForm, LiftedPoint};
use crate::operator::{
    dirac_residual, max_difference, normalization_defect, symmetry_defect, OperatorError, PrequantumOperator, Section,
};
use crate::quantum::{
    energy_expectation, jacobi_eigh, projective_distance, propagate_many, propagator, random_hermitian,
    random_unit_state, tangency_defect, unitarity_defect, ComplexMatrix, QuantumError, StateVector,
};
use crate::scenario::{Scenario, ScenarioError};
use crate::symplectic::{
    canonical_poisson_bracket, differential, evaluate_field, field_lie_bracket, hamiltonian_vector_field,
    poisson_bracket, symplectic_product, TangentVector, VectorField,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Error, PartialEq)]
pub enum ToleranceError {
    #[error("unknown tolerance '{0}'")]
    Unknown(String),
    #[error("tolerance override must look like NAME=VALUE, got '{0}'")]
    Malformed(String),
    #[error("tolerance {name} must be a non-negative number, got '{value}'")]
    BadValue { name: String, value: String },
}

/// Named thresholds, overridable one by one.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("fd_relative", 1e-6),
    ("round_trip", 0.0),
    ("simplify", 0.0),
    ("energy_drift", 1e-6),
    ("symplecticity", 1e-5),
    ("reversibility", 1e-10),
    ("evolution", 1e-4),
    ("pairing", 1e-9),
    ("homomorphism", 1e-9),
    ("sign_relation", 1e-12),
    ("pointwise_bracket", 1e-12),
    ("jacobi_identity", 1e-9),
    ("connection", 1e-12),
    ("gauge", 1e-9),
    ("dirac", 1e-9),
    ("identity_operator", 1e-15),
    ("normalization", 1e-12),
    ("symmetry", 1e-8),
    ("unitarity", 1e-12),
    ("norm", 1e-12),
    ("tangency", 1e-12),
    ("stationary", 1e-10),
    ("group", 1e-11),
    ("energy_expectation", 1e-11),
    ("eigen_residual", 1e-11),
    ("orthonormality", 1e-12),
];

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULT_TOLERANCES.iter().copied().collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("no tolerance named {name}"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ToleranceError> {
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(ToleranceError::Unknown(name.to_string())),
        }
    }

    /// Applies a `NAME=VALUE` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ToleranceError> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| ToleranceError::Malformed(spec.to_string()))?;
        let name = name.trim();
        let parsed: f64 = value.trim().parse().map_err(|_| ToleranceError::BadValue {
            name: name.to_string(),
            value: value.to_string(),
        })?;
        if parsed.is_nan() || parsed < 0.0 {
            return Err(ToleranceError::BadValue {
                name: name.to_string(),
                value: value.to_string(),
            });
        }
        self.set(name, parsed)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `measured ≤ tolerance`; NaN never passes.
    pub fn new(name: impl Into<String>, tolerance: f64, measured: f64) -> Self {
        Check {
            name: name.into(),
            tolerance,
            measured,
            pass: measured <= tolerance,
        }
    }

    /// A yes/no property reported as measured 0 (holds) or 1 (fails).
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, 0.0, if ok { 0.0 } else { 1.0 })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub seed: u64,
    pub scenario: String,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Central difference `(f(z + h e_v) − f(z − h e_v)) / 2h`.
pub fn central_difference(f: &Observable, z: &[f64], var: Var, h: f64) -> Result<f64, EvalError> {
    let slot = var.slot(f.dim());
    let mut plus = z.to_vec();
    let mut minus = z.to_vec();
    plus[slot] += h;
    minus[slot] -= h;
    Ok((f.evaluate_flat(&plus)? - f.evaluate_flat(&minus)?) / (2.0 * h))
}

pub const FD_STEP: f64 = 1e-5;

fn variables(dim: usize) -> impl Iterator<Item = Var> {
    (0..dim).map(Var::q).chain((0..dim).map(Var::p))
}

/// `max |∂f/∂v − FD| / max(1, |FD|)` over every variable and point.
pub fn fd_oracle_error(f: &Observable, points: &[Vec<f64>]) -> Result<f64, EvalError> {
    let mut worst = 0.0_f64;
    for var in variables(f.dim()) {
        let d = f.differentiate(var);
        for z in points {
            let fd = central_difference(f, z, var, FD_STEP)?;
            let sym = d.evaluate_flat(z)?;
            worst = worst.max((sym - fd).abs() / fd.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// `max |f(z) − parse(print(f))(z)|`; NaN if the printed text fails to parse.
pub fn round_trip_error(f: &Observable, points: &[Vec<f64>]) -> Result<f64, EvalError> {
    let Ok(back) = Observable::parse(&f.to_string(), f.dim()) else {
        return Ok(f64::NAN);
    };
    let mut worst = 0.0_f64;
    for z in points {
        worst = worst.max((f.evaluate_flat(z)? - back.evaluate_flat(z)?).abs());
    }
    Ok(worst)
}

fn field_deviation(x: &VectorField, y: &VectorField, points: &[crate::PhasePoint]) -> Result<f64, EvalError> {
    let mut worst = 0.0_f64;
    for z in points {
        let a = evaluate_field(x, z)?.to_flat();
        let b = evaluate_field(y, z)?.to_flat();
        for (u, v) in a.iter().zip(&b) {
            worst = worst.max((u - v).abs());
        }
    }
    Ok(worst)
}

/// `max ‖[X_f, X_g] − X_{f,g}‖_∞` over `pairs` random polynomial pairs.
pub fn homomorphism_defect(dim: usize, pairs: usize, points: usize, seed: u64) -> Result<f64, EvalError> {
    let mut rng = corpus::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let f = random_polynomial(dim, 3, &mut rng);
        let g = random_polynomial(dim, 3, &mut rng);
        let zs = sample_points(dim, points, 2.0, &mut rng);
        let lhs = field_lie_bracket(&hamiltonian_vector_field(&f), &hamiltonian_vector_field(&g));
        let rhs = hamiltonian_vector_field(&poisson_bracket(&f, &g));
        worst = worst.max(field_deviation(&lhs, &rhs, &zs)?);
    }
    Ok(worst)
}

fn bracket_checks(dim: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Check>, VerifyError> {
    let mut rng = corpus::rng(seed ^ 0x5eed_b4ac);
    let mut sign = 0.0_f64;
    let mut pointwise = 0.0_f64;
    let mut jacobi = 0.0_f64;
    for _ in 0..10 {
        let f = random_polynomial(dim, 3, &mut rng);
        let g = random_polynomial(dim, 3, &mut rng);
        let h = random_polynomial(dim, 3, &mut rng);
        let fg = poisson_bracket(&f, &g);
        let canonical = canonical_poisson_bracket(&f, &g);
        let cyclic =
            poisson_bracket(&f, &poisson_bracket(&g, &h)) + poisson_bracket(&g, &poisson_bracket(&h, &f)) + poisson_bracket(&h, &fg);
        let (xf, xg) = (hamiltonian_vector_field(&f), hamiltonian_vector_field(&g));
        for z in sample_points(dim, 20, 2.0, &mut rng) {
            let value = fg.evaluate(&z)?;
            sign = sign.max((canonical.evaluate(&z)? + value).abs());
            let product = symplectic_product(&evaluate_field(&xf, &z)?, &evaluate_field(&xg, &z)?);
            pointwise = pointwise.max((product - value).abs() / value.abs().max(1.0));
            jacobi = jacobi.max(cyclic.evaluate(&z)?.abs());
        }
    }
    Ok(vec![
        Check::new("bracket_sign_relation", tol.get("sign_relation"), sign),
        Check::new("bracket_pointwise_identity", tol.get("pointwise_bracket"), pointwise),
        Check::new("jacobi_identity", tol.get("jacobi_identity"), jacobi),
    ])
}

/// `max |ω0(X_f(z), e) + df_z(e)|` over basis vectors `e`.
pub fn pairing_defect(f: &Observable, points: &[crate::PhasePoint]) -> Result<f64, EvalError> {
    let xf = hamiltonian_vector_field(f);
    let n = f.dim();
    let mut worst = 0.0_f64;
    for z in points {
        let x = evaluate_field(&xf, z)?;
        for k in 0..2 * n {
            let e = TangentVector::basis(n, k);
            worst = worst.max((symplectic_product(&x, &e) + differential(f, z, &e)?).abs());
        }
    }
    Ok(worst)
}

/// `max |α(V_f)(z) − f(z)|`.
pub fn connection_defect(f: &Observable, points: &[crate::PhasePoint]) -> Result<f64, EvalError> {
    let lifted = lift_field(f);
    let mut worst = 0.0_f64;
    for z in points {
        let v = lifted.evaluate(z)?;
        let alpha = connection_pairing(&v, &LiftedPoint::new(z.clone(), 0.0));
        worst = worst.max((alpha - f.evaluate(z)?).abs());
    }
    Ok(worst)
}

/// Dirac residual maximized over all corpus pairs and `sections`.
pub fn dirac_defect(dim: usize, sections: &[Section], points: &[crate::PhasePoint], hbar: f64) -> Result<f64, OperatorError> {
    let corpus = dirac_corpus(dim);
    let mut worst = 0.0_f64;
    for (i, f) in corpus.iter().enumerate() {
        for g in &corpus[i + 1..] {
            for s in sections {
                worst = worst.max(dirac_residual(f, g, s, points, hbar)?);
            }
        }
    }
    Ok(worst)
}

/// `max |Ω(1)s − s|`.
pub fn identity_defect(dim: usize, sections: &[Section], points: &[crate::PhasePoint], hbar: f64) -> Result<f64, OperatorError> {
    let one = PrequantumOperator::new(&Observable::constant(dim, 1.0), hbar)?;
    let mut worst = 0.0_f64;
    for s in sections {
        worst = worst.max(max_difference(&one.apply(s), s, points)?);
    }
    Ok(worst)
}

/// Symmetry surrogate grid: half-width and nodes per axis.
pub const SYMMETRY_BOX: f64 = 6.0;
pub const SYMMETRY_GRID: usize = 201;

#[derive(Debug, Clone, Serialize)]
pub struct QuantumSummary {
    pub unitarity: f64,
    pub norm: f64,
    pub tangency: f64,
    pub stationary: f64,
    pub group: f64,
    pub energy_expectation: f64,
    pub eigen_residual: f64,
    pub orthonormality: f64,
}

/// Worst-case values of the finite-dimensional invariants over random
/// Hermitian matrices of dimension 2, 4 and 8.
pub fn quantum_summary(seed: u64, hbar: f64) -> Result<QuantumSummary, QuantumError> {
    let mut rng = corpus::rng(seed ^ 0x9e37_79b9);
    let times = [0.1, 1.0, 10.0];
    let mut s = QuantumSummary {
        unitarity: 0.0,
        norm: 0.0,
        tangency: 0.0,
        stationary: 0.0,
        group: 0.0,
        energy_expectation: 0.0,
        eigen_residual: 0.0,
        orthonormality: 0.0,
    };
    for d in [2, 4, 8] {
        let h = random_hermitian(d, &mut rng);
        let psi0 = random_unit_state(d, &mut rng);
        let eig = jacobi_eigh(&h)?;
        let lambda = ComplexMatrix::from_real_diagonal(&eig.values);
        s.eigen_residual = s
            .eigen_residual
            .max(h.matrix().matmul(&eig.vectors).max_abs_diff(&eig.vectors.matmul(&lambda)));
        s.orthonormality = s
            .orthonormality
            .max(eig.vectors.adjoint().matmul(&eig.vectors).max_abs_diff(&ComplexMatrix::identity(d)));

        let e0 = energy_expectation(&h, &psi0)?;
        for psi in propagate_many(&h, &psi0, &times, hbar)? {
            s.norm = s.norm.max((psi.norm() - 1.0).abs());
            s.tangency = s.tangency.max(tangency_defect(&h, &psi, hbar)?);
            s.energy_expectation = s.energy_expectation.max((energy_expectation(&h, &psi)? - e0).abs());
        }
        let eigenstate = StateVector::new((0..d).map(|i| eig.vectors[(i, 0)]).collect())?.normalized()?;
        for psi in propagate_many(&h, &eigenstate, &times, hbar)? {
            s.stationary = s.stationary.max(projective_distance(&psi, &eigenstate));
        }
        for &t in &times {
            s.unitarity = s.unitarity.max(unitarity_defect(&h, t, hbar)?);
        }
        let (t, u) = (rng_time(&mut rng), rng_time(&mut rng));
        let lhs = propagator(&h, t + u, hbar)?;
        let rhs = propagator(&h, t, hbar)?.matmul(&propagator(&h, u, hbar)?);
        s.group = s.group.max(lhs.max_abs_diff(&rhs));
    }
    Ok(s)
}

fn rng_time(rng: &mut impl rand::Rng) -> f64 {
    rng.random_range(-5.0..5.0)
}

/// Runs every invariant suite against `scenario`.
pub fn verify_scenario(scenario: &Scenario, tol: &Tolerances) -> Result<Vec<Check>, VerifyError> {
    let n = scenario.dim;
    let seed = scenario.seed;
    let mut rng = corpus::rng(seed);
    let mut checks = Vec::new();

    // Expressions: the scenario's own plus the fixed corpus.
    let mut exprs: Vec<Observable> = vec![scenario.hamiltonian.clone()];
    exprs.extend(scenario.observables.iter().cloned());
    let mut fd = 0.0_f64;
    let mut round_trip = 0.0_f64;
    let mut simplify = 0.0_f64;
    for f in exprs.iter().chain(&corpus::expression_corpus()) {
        let points: Vec<Vec<f64>> =
            sample_points(f.dim(), 50, 2.0, &mut rng).iter().map(|z| z.to_flat()).collect();
        fd = fd.max(fd_oracle_error(f, &points)?);
        round_trip = round_trip.max(round_trip_error(f, &points)?);
        let simplified = f.simplify();
        for z in &points {
            let diff = (simplified.evaluate_flat(z)? - f.evaluate_flat(z)?).abs();
            simplify = simplify.max(diff);
        }
        if simplified.simplify() != simplified {
            simplify = f64::NAN;
        }
    }
    checks.push(Check::new("derivative_fd_oracle", tol.get("fd_relative"), fd));
    checks.push(Check::new("print_parse_round_trip", tol.get("round_trip"), round_trip));
    checks.push(Check::new("simplify_preserves_evaluation", tol.get("simplify"), simplify));

    // Flow.
    let system = scenario.system()?;
    let z0 = &scenario.initial.base;
    let traj = integrate(&system, z0, scenario.dt, scenario.steps, scenario.integrator)?;
    checks.push(Check::new("energy_drift", tol.get("energy_drift"), energy_drift(&traj)?));
    let unit_steps = (1.0 / scenario.dt).round().max(1.0);
    let jac = flow_jacobian(&system, z0, unit_steps * scenario.dt, scenario.dt, scenario.integrator)?;
    checks.push(Check::new("symplecticity", tol.get("symplecticity"), symplecticity_defect(&jac)));
    let there = step(&system, z0, scenario.dt, IntegratorKind::ImplicitMidpoint)?;
    let back = step(&system, &there, -scenario.dt, IntegratorKind::ImplicitMidpoint)?;
    let reversal = z0
        .to_flat()
        .iter()
        .zip(back.to_flat())
        .fold(0.0_f64, |w, (a, b)| w.max((a - b).abs()));
    checks.push(Check::new("midpoint_reversibility", tol.get("reversibility"), reversal));
    for f in &scenario.observables {
        let defect = observable_evolution_defect(f, &traj)?;
        checks.push(Check::new(format!("observable_evolution[{f}]"), tol.get("evolution"), defect));
    }

    // Symplectic structure.
    let points = sample_points(n, 100, 2.0, &mut rng);
    checks.push(Check::new(
        "hamiltonian_field_pairing",
        tol.get("pairing"),
        pairing_defect(&scenario.hamiltonian, &points)?,
    ));
    checks.push(Check::new(
        "bracket_homomorphism",
        tol.get("homomorphism"),
        homomorphism_defect(n, 25, 100, seed)?,
    ));
    checks.extend(bracket_checks(n, seed, tol)?);

    // Lift.
    let mut lift_targets = exprs.clone();
    if n == 1 {
        lift_targets.extend(corpus::lift_corpus());
    }
    let lift_points = sample_points(n, 1000, 2.0, &mut rng);
    let mut connection = 0.0_f64;
    let mut projects = true;
    for f in &lift_targets {
        connection = connection.max(connection_defect(f, &lift_points)?);
        projects &= project(&lift_field(f)) == hamiltonian_vector_field(f);
    }
    checks.push(Check::new("connection_reproduces_generator", tol.get("connection"), connection));
    checks.push(Check::holds("projection_is_hamiltonian_field", projects));
    checks.push(Check::holds("curvature_is_omega", ConnectionForm::new(n).curvature_is_omega()));
    let c1 = lift_field(&Observable::constant(n, 1.0));
    let c2 = lift_field(&Observable::constant(n, 2.0));
    checks.push(Check::holds("lift_injective_on_constants", c1 != c2));
    let lifted = integrate_lifted(&system, &scenario.initial, scenario.dt, scenario.steps, scenario.integrator)?;
    let shifted_start = LiftedPoint::new(z0.clone(), scenario.initial.theta + 2.0 * PI);
    let shifted = integrate_lifted(&system, &shifted_start, scenario.dt, scenario.steps, scenario.integrator)?;
    let gauge = lifted
        .thetas
        .iter()
        .zip(&shifted.thetas)
        .fold(0.0_f64, |w, (a, b)| w.max((b - a - 2.0 * PI).abs()));
    checks.push(Check::new("gauge_consistency", tol.get("gauge"), gauge));

    // Prequantum operator.
    let sections = if scenario.sections.is_empty() {
        gaussian_sections(n)
    } else {
        scenario.sections.clone()
    };
    let op_points = sample_points(n, 100, 2.0, &mut rng);
    checks.push(Check::new(
        "dirac_condition",
        tol.get("dirac"),
        dirac_defect(n, &sections, &op_points, scenario.hbar)?,
    ));
    checks.push(Check::new(
        "identity_operator",
        tol.get("identity_operator"),
        identity_defect(n, &sections, &op_points, scenario.hbar)?,
    ));
    let mut normalization = 0.0_f64;
    for f in [Observable::q(n, 0), Observable::p(n, 0)] {
        for s in &sections {
            normalization = normalization.max(normalization_defect(&f, s, &op_points)?);
        }
    }
    checks.push(Check::new("unit_planck_normalization", tol.get("normalization"), normalization));
    if n == 1 {
        let decaying: Vec<&Section> = sections.iter().filter(|s| s.has_gaussian_decay()).collect();
        if let Some(&s1) = decaying.first() {
            let s2 = *decaying.get(1).unwrap_or(&s1);
            for f in [Observable::q(1, 0), Observable::p(1, 0)] {
                let defect = symmetry_defect(&f, s1, s2, SYMMETRY_BOX, SYMMETRY_GRID, scenario.hbar)?;
                checks.push(Check::new(format!("symmetry[{f}]"), tol.get("symmetry"), defect));
            }
        }
    }

    // Finite-dimensional quantum dynamics.
    let q = quantum_summary(seed, scenario.hbar)?;
    checks.push(Check::new("unitarity", tol.get("unitarity"), q.unitarity));
    checks.push(Check::new("norm_preservation", tol.get("norm"), q.norm));
    checks.push(Check::new("tangency", tol.get("tangency"), q.tangency));
    checks.push(Check::new("stationary_states", tol.get("stationary"), q.stationary));
    checks.push(Check::new("group_property", tol.get("group"), q.group));
    checks.push(Check::new("energy_expectation", tol.get("energy_expectation"), q.energy_expectation));
    checks.push(Check::new("eigen_residual", tol.get("eigen_residual"), q.eigen_residual));
    checks.push(Check::new("eigenvector_orthonormality", tol.get("orthonormality"), q.orthonormality));

    Ok(checks)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    pub f: String,
    pub g: String,
    pub section: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationResult {
    pub f: String,
    pub defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryResult {
    pub f: String,
    pub s1: usize,
    pub s2: usize,
    pub defect: f64,
}

/// Detailed prequantum-operator report.
#[derive(Debug, Clone, Serialize)]
pub struct OpcheckReport {
    pub hbar: f64,
    pub sections: Vec<String>,
    pub pairs: Vec<PairResidual>,
    pub identity_defect: f64,
    pub normalization: Vec<NormalizationResult>,
    pub symmetry: Vec<SymmetryResult>,
    pub checks: Vec<Check>,
}

impl OpcheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn opcheck(scenario: &Scenario, tol: &Tolerances) -> Result<OpcheckReport, VerifyError> {
    let n = scenario.dim;
    let hbar = scenario.hbar;
    let sections = if scenario.sections.is_empty() {
        gaussian_sections(n)
    } else {
        scenario.sections.clone()
    };
    let points = sample_points(n, 100, 2.0, &mut corpus::rng(scenario.seed));
    let mut generators = dirac_corpus(n);
    for f in scenario.observables.iter().chain([&scenario.hamiltonian]) {
        if !generators.contains(f) {
            generators.push(f.clone());
        }
    }

    let mut pairs = Vec::new();
    for (i, f) in generators.iter().enumerate() {
        for g in &generators[i + 1..] {
            for (k, s) in sections.iter().enumerate() {
                pairs.push(PairResidual {
                    f: f.to_string(),
                    g: g.to_string(),
                    section: k,
                    residual: dirac_residual(f, g, s, &points, hbar)?,
                });
            }
        }
    }
    let identity = identity_defect(n, &sections, &points, hbar)?;
    let mut normalization = Vec::new();
    for f in [Observable::q(n, 0), Observable::p(n, 0)] {
        let mut defect = 0.0_f64;
        for s in &sections {
            defect = defect.max(normalization_defect(&f, s, &points)?);
        }
        normalization.push(NormalizationResult { f: f.to_string(), defect });
    }
    let mut symmetry = Vec::new();
    if n == 1 {
        let decaying: Vec<usize> = (0..sections.len()).filter(|&k| sections[k].has_gaussian_decay()).collect();
        for f in [Observable::constant(1, 1.0), Observable::q(1, 0), Observable::p(1, 0)] {
            for (a, &i) in decaying.iter().enumerate() {
                for &j in &decaying[a..] {
                    let defect = symmetry_defect(&f, &sections[i], &sections[j], SYMMETRY_BOX, SYMMETRY_GRID, hbar)?;
                    symmetry.push(SymmetryResult {
                        f: f.to_string(),
                        s1: i,
                        s2: j,
                        defect,
                    });
                }
            }
        }
    }

    let worst_pair = pairs.iter().fold(0.0_f64, |w, r| w.max(r.residual));
    let worst_norm = normalization.iter().fold(0.0_f64, |w, r| w.max(r.defect));
    let mut checks = vec![
        Check::new("dirac_condition", tol.get("dirac"), worst_pair),
        Check::new("identity_operator", tol.get("identity_operator"), identity),
        Check::new("unit_planck_normalization", tol.get("normalization"), worst_norm),
    ];
    if !symmetry.is_empty() {
        let worst = symmetry.iter().fold(0.0_f64, |w, r| w.max(r.defect));
        checks.push(Check::new("symmetry", tol.get("symmetry"), worst));
    }
    Ok(OpcheckReport {
        hbar,
        sections: sections.iter().map(|s| s.to_string()).collect(),
        pairs,
        identity_defect: identity,
        normalization,
        symmetry,
        checks,
    })
}

/// Both bracket conventions of `(f, g)` evaluated at `points`.
#[derive(Debug, Clone, Serialize)]
pub struct BracketSummary {
    pub f: String,
    pub g: String,
    pub omega_bracket: String,
    pub canonical_bracket: String,
    pub samples: Vec<BracketSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketSample {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub omega: f64,
    pub canonical: f64,
}

pub fn bracket_summary(
    f: &Observable,
    g: &Observable,
    points: &[crate::PhasePoint],
) -> Result<BracketSummary, EvalError> {
    let omega = poisson_bracket(f, g);
    let canonical = canonical_poisson_bracket(f, g);
    let samples = points
        .iter()
        .map(|z| {
            Ok(BracketSample {
                q: z.q.clone(),
                p: z.p.clone(),
                omega: omega.evaluate(z)?,
                canonical: canonical.evaluate(z)?,
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(BracketSummary {
        f: f.to_string(),
        g: g.to_string(),
        omega_bracket: omega.to_string(),
        canonical_bracket: canonical.to_string(),
        samples,
    })
}

/// Complex numbers as `[re, im]` pairs.
pub fn complex_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.apply_override("energy_drift=1e-3").unwrap();
        assert_eq!(t.get("energy_drift"), 1e-3);
        assert!(matches!(t.apply_override("bogus=1"), Err(ToleranceError::Unknown(_))));
        assert!(matches!(t.apply_override("energy_drift"), Err(ToleranceError::Malformed(_))));
        assert!(matches!(t.apply_override("energy_drift=-1"), Err(ToleranceError::BadValue { .. })));
        assert!(matches!(t.apply_override("energy_drift=x"), Err(ToleranceError::BadValue { .. })));
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Check::new("x", 1.0, f64::NAN).pass);
        assert!(Check::new("x", 0.0, 0.0).pass);
        assert!(!Check::holds("x", false).pass);
    }

    #[test]
    fn quantum_summary_is_within_tolerances() {
        let s = quantum_summary(1, 1.0).unwrap();
        assert!(s.unitarity < 1e-12 && s.norm < 1e-12 && s.tangency < 1e-12);
        assert!(s.stationary < 1e-10 && s.group < 1e-11 && s.energy_expectation < 1e-11);
        assert!(s.eigen_residual < 1e-11 && s.orthonormality < 1e-12);
    }
}
