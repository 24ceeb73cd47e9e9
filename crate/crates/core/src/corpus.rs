//! Fixed test corpora and seeded random generators shared by the property
//! suites, the verifier and the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Observable;
use crate::operator::Section;
use crate::symplectic::PhasePoint;

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exponent vectors over `vars` variables with total degree at most `degree`,
/// in graded lexicographic order.
fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, vars: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == vars {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            extend(prefix, vars, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), vars, degree, &mut out);
    out.sort_by_key(|m| m.iter().sum::<u32>());
    out
}

/// Dense polynomial of total degree at most `degree` in `q1..qn, p1..pn`
/// with coefficients uniform in `[−1, 1]`.
pub fn random_polynomial(dim: usize, degree: u32, rng: &mut impl Rng) -> Observable {
    let mut poly = Observable::constant(dim, 0.0);
    for exps in monomials(2 * dim, degree) {
        let coefficient: f64 = rng.random_range(-1.0..=1.0);
        let mut term = Observable::constant(dim, coefficient);
        for (slot, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let var = if slot < dim {
                Observable::q(dim, slot)
            } else {
                Observable::p(dim, slot - dim)
            };
            term = term * var.powi(e as i32);
        }
        poly = poly + term;
    }
    poly
}

/// Points uniform in `[−half_width, half_width]^2n`.
pub fn sample_points(dim: usize, count: usize, half_width: f64, rng: &mut impl Rng) -> Vec<PhasePoint> {
    (0..count)
        .map(|_| {
            let mut coord = || rng.random_range(-half_width..=half_width);
            let q = (0..dim).map(|_| coord()).collect();
            let p = (0..dim).map(|_| coord()).collect();
            PhasePoint::new(q, p)
        })
        .collect()
}

/// `(text, dim)` pairs exercising every node kind. Every entry is defined on
/// all of `[−2, 2]^2n`.
pub const EXPRESSION_CORPUS: &[(&str, usize)] = &[
    ("(p1^2 + q1^2)/2", 1),
    ("q1*p1", 1),
    ("q1^2*p1 - 3*q1^3 + 0.5", 1),
    ("p1^4/4 + q1^4/4", 1),
    ("sin(q1)*cos(p1)", 1),
    ("exp(-(q1^2 + p1^2)/2)", 1),
    ("sqrt(1 + q1^2 + p1^2)", 1),
    ("ln(2 + sin(q1*p1))", 1),
    ("q1/(1 + p1^2)", 1),
    ("pi*q1 + p1/pi", 1),
    ("cos(pi*q1)^3 - -p1", 1),
    ("1/(2 + cos(q1))^2", 1),
    ("(p1^2 + p2^2 + q1^2 + q2^2)/2", 2),
    ("q1*p2 - q2*p1", 2),
    ("exp(q1*q2 - p1)*sin(p2)", 2),
    ("ln(1 + q1^2*p2^2) + sqrt(3 + cos(q2))", 2),
    ("q2^3*p1 - 2*q1*p2^2/(1 + q2^2)", 2),
    ("-(q1 - q2)^2 + p1^2/2 + p2^2/2", 2),
];

pub fn expression_corpus() -> Vec<Observable> {
    EXPRESSION_CORPUS
        .iter()
        .map(|(text, dim)| Observable::parse(text, *dim).expect("corpus entry parses"))
        .collect()
}

/// Ten one-degree-of-freedom observables for the connection identities.
pub const LIFT_CORPUS: &[&str] = &[
    "1",
    "q1",
    "p1",
    "q1^2",
    "p1^2/2",
    "q1*p1",
    "q1^2*p1",
    "(p1^2 + q1^2)/2",
    "p1^4/4 + q1^4/4",
    "sin(q1)*p1 + exp(p1/2)",
];

pub fn lift_corpus() -> Vec<Observable> {
    LIFT_CORPUS
        .iter()
        .map(|text| Observable::parse(text, 1).expect("corpus entry parses"))
        .collect()
}

/// Generators for the bracket-to-commutator check.
pub const DIRAC_CORPUS: &[&str] = &["1", "q1", "p1", "q1^2", "p1^2", "q1*p1", "q1^2*p1"];

pub fn dirac_corpus(dim: usize) -> Vec<Observable> {
    DIRAC_CORPUS
        .iter()
        .map(|text| Observable::parse(text, dim).expect("corpus entry parses"))
        .collect()
}

/// Gaussian-times-polynomial sections `(re, im)` on one degree of freedom.
pub const GAUSSIAN_SECTIONS: &[(&str, &str)] = &[
    ("exp(-(q1^2 + p1^2)/2)", "0"),
    ("(1 + q1)*exp(-(q1^2 + p1^2)/2)", "p1*exp(-(q1^2 + p1^2)/2)"),
    ("(q1^2 - p1)*exp(-(q1^2 + p1^2)/2)", "(2*q1*p1 - 1)*exp(-(q1^2 + p1^2)/2)"),
];

pub fn gaussian_sections(dim: usize) -> Vec<Section> {
    GAUSSIAN_SECTIONS
        .iter()
        .map(|(re, im)| Section::parse(re, im, dim).expect("corpus entry parses"))
        .collect()
}
