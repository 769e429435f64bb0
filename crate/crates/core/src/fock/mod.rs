//! Fock-basis truncations of polynomials in the ladder operators.
//!
//! A polynomial is stored as a sum of words over `{a, a†}`. Its truncation
//! to `V_d = span{|0⟩, …, |d−1⟩}` is the compression `P_d p P_d`, which is
//! not the same as multiplying truncated factors: `(P_d Q P_d)²` misses the
//! `|d−1⟩ → |d⟩ → |d−1⟩` path that `P_d Q² P_d` keeps.

mod expr;

pub use expr::parse_polynomial;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, StateVector, C64};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Entrywise tolerance for accepting a truncated matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ladder {
    /// `a`
    Lower,
    /// `a†`
    Raise,
}

impl Ladder {
    fn adjoint(self) -> Ladder {
        match self {
            Ladder::Lower => Ladder::Raise,
            Ladder::Raise => Ladder::Lower,
        }
    }
}

/// Finite sum of coefficient × word; a word `[w0, w1, …]` is the operator
/// product `w0 · w1 · …` and the empty word is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderPolynomial {
    terms: Vec<(C64, Vec<Ladder>)>,
}

impl LadderPolynomial {
    pub fn zero() -> Self {
        LadderPolynomial { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        LadderPolynomial::from_terms(vec![(c, Vec::new())])
    }

    pub fn identity() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn lowering() -> Self {
        LadderPolynomial::from_terms(vec![(C64::new(1.0, 0.0), vec![Ladder::Lower])])
    }

    pub fn raising() -> Self {
        LadderPolynomial::from_terms(vec![(C64::new(1.0, 0.0), vec![Ladder::Raise])])
    }

    /// `N = a†a`
    pub fn number() -> Self {
        LadderPolynomial::from_terms(vec![(C64::new(1.0, 0.0), vec![Ladder::Raise, Ladder::Lower])])
    }

    /// `Q = (a + a†)/√2`
    pub fn position() -> Self {
        let c = C64::new(FRAC_1_SQRT_2, 0.0);
        LadderPolynomial::from_terms(vec![(c, vec![Ladder::Lower]), (c, vec![Ladder::Raise])])
    }

    /// `P = i(a† − a)/√2`
    pub fn momentum() -> Self {
        let c = C64::new(0.0, FRAC_1_SQRT_2);
        LadderPolynomial::from_terms(vec![(c, vec![Ladder::Raise]), (-c, vec![Ladder::Lower])])
    }

    /// Builds from raw terms, merging repeated words and dropping terms
    /// that cancel to rounding level.
    pub fn from_terms(terms: Vec<(C64, Vec<Ladder>)>) -> Self {
        let mut merged: BTreeMap<Vec<Ladder>, C64> = BTreeMap::new();
        for (c, w) in terms {
            *merged.entry(w).or_default() += c;
        }
        let scale = merged.values().map(|c| c.norm()).fold(0.0, f64::max);
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-14 * scale)
            .map(|(w, c)| (c, w))
            .collect();
        LadderPolynomial { terms }
    }

    pub fn terms(&self) -> &[(C64, Vec<Ladder>)] {
        &self.terms
    }

    /// Longest word length.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    pub fn adjoint(&self) -> Self {
        LadderPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(c, w)| (c.conj(), w.iter().rev().map(|l| l.adjoint()).collect()))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LadderPolynomial::from_terms(terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        LadderPolynomial::from_terms(self.terms.iter().map(|(c, w)| (c * s, w.clone())).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((c1 * c2, w));
            }
        }
        LadderPolynomial::from_terms(terms)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(LadderPolynomial::identity(), |acc, _| acc.mul(self))
    }

    /// Word-level Hermiticity: the term set equals its conjugate-reversed
    /// term set. Sufficient but not necessary, since it does not normal-order.
    pub fn is_symbolically_hermitian(&self) -> bool {
        let adj = self.adjoint();
        if adj.terms.len() != self.terms.len() {
            return false;
        }
        let scale = self.terms.iter().map(|(c, _)| c.norm()).fold(1.0, f64::max);
        self.terms
            .iter()
            .zip(&adj.terms)
            .all(|((c1, w1), (c2, w2))| w1 == w2 && (c1 - c2).norm() <= 1e-14 * scale)
    }

    /// Matrix elements `⟨i|p|j⟩` for `i, j < d`.
    ///
    /// Each word sends `|j⟩` to a multiple of a single Fock state, so the
    /// block is assembled by walking every word over every column. Indices
    /// never leave `V_{d+degree}`, which makes this identical to multiplying
    /// ladder matrices of dimension `d + degree` and cutting the `d × d`
    /// block.
    pub fn compress(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            for (c, word) in &self.terms {
                if let Some((i, amp)) = walk(word, j) {
                    if i < d {
                        let v = m.get(i, j) + c * amp;
                        m.set(i, j, v);
                    }
                }
            }
        }
        m
    }
}

/// Applies a word to `|j⟩` (rightmost letter first), returning the target
/// index and amplitude, or `None` when the word annihilates `|j⟩`.
///
/// The amplitude is the square root of an integer product, so words such as
/// `a†a` give exact integers.
fn walk(word: &[Ladder], j: usize) -> Option<(usize, f64)> {
    let mut idx = j;
    let mut squared = 1.0f64;
    for letter in word.iter().rev() {
        match letter {
            Ladder::Lower => {
                if idx == 0 {
                    return None;
                }
                squared *= idx as f64;
                idx -= 1;
            }
            Ladder::Raise => {
                idx += 1;
                squared *= idx as f64;
            }
        }
    }
    Some((idx, squared.sqrt()))
}

impl fmt::Display for LadderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, w)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for l in w {
                write!(f, "*{}", if *l == Ladder::Lower { "a" } else { "adag" })?;
            }
        }
        Ok(())
    }
}

/// Fock-basis truncation to the first `dim` number states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationScheme {
    dim: usize,
}

impl TruncationScheme {
    pub fn fock(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("truncation dimension must be >= 1"));
        }
        Ok(TruncationScheme { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &'static str {
        "fock"
    }
}

/// `P_d p P_d` as a Hermitian matrix.
///
/// Polynomials that fail the word-level check are still accepted when the
/// compressed block is Hermitian to within [`HERMITIAN_TOL`].
pub fn truncate_polynomial(p: &LadderPolynomial, scheme: TruncationScheme) -> Result<HermitianMatrix> {
    let m = p.compress(scheme.dim());
    if !p.is_symbolically_hermitian() {
        let asym = HermitianMatrix::asymmetry(&m);
        if asym > HERMITIAN_TOL {
            return Err(Error::usage(format!(
                "polynomial is not Hermitian (asymmetry {asym:e} at d = {})",
                scheme.dim()
            )));
        }
    }
    HermitianMatrix::new(m)
}

/// Truncated annihilation operator: `(m−1, m)` entry `√m`.
pub fn annihilation_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn creation_matrix(d: usize) -> ComplexMatrix {
    annihilation_matrix(d).adjoint()
}

/// `Q_d = (a_d + a_d†)/√2`
pub fn position_matrix(d: usize) -> Result<HermitianMatrix> {
    let a = annihilation_matrix(d);
    HermitianMatrix::new((&a + &a.adjoint()).scale(C64::new(FRAC_1_SQRT_2, 0.0)))
}

/// `P_d = i(a_d† − a_d)/√2`
pub fn momentum_matrix(d: usize) -> Result<HermitianMatrix> {
    let a = annihilation_matrix(d);
    HermitianMatrix::new((&a.adjoint() - &a).scale(C64::new(0.0, FRAC_1_SQRT_2)))
}

/// Number state `|m⟩` in `V_d`.
pub fn fock_state(m: usize, d: usize) -> Result<StateVector> {
    if m >= d {
        return Err(Error::usage(format!(
            "Fock state |{m}⟩ lies outside the truncation dimension {d}"
        )));
    }
    StateVector::basis(m, d)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = ["half_q2", "half_p2", "harmonic_oscillator", "squeezing", "q3", "p2"];

fn word(s: &str) -> Vec<Ladder> {
    s.chars()
        .map(|c| match c {
            'a' => Ladder::Lower,
            'd' => Ladder::Raise,
            _ => unreachable!("builtin words use 'a' and 'd'"),
        })
        .collect()
}

fn normal_ordered(terms: &[(f64, f64, &str)]) -> LadderPolynomial {
    LadderPolynomial::from_terms(terms.iter().map(|&(re, im, w)| (C64::new(re, im), word(w))).collect())
}

/// Built-in Hamiltonians in normal-ordered form (`d` marks `a†`).
pub fn builtin(name: &str) -> Result<LadderPolynomial> {
    let r2 = std::f64::consts::SQRT_2;
    let p = match name {
        // ½Q² = ¼(aa + a†a† + 2a†a + 1)
        "half_q2" => normal_ordered(&[(0.25, 0.0, "aa"), (0.25, 0.0, "dd"), (0.5, 0.0, "da"), (0.25, 0.0, "")]),
        // ½P² = ¼(−aa − a†a† + 2a†a + 1)
        "half_p2" => normal_ordered(&[(-0.25, 0.0, "aa"), (-0.25, 0.0, "dd"), (0.5, 0.0, "da"), (0.25, 0.0, "")]),
        // ½(Q² + P²) = N + ½
        "harmonic_oscillator" => normal_ordered(&[(1.0, 0.0, "da"), (0.5, 0.0, "")]),
        // ½(QP + PQ) = (i/2)(a†a† − aa)
        "squeezing" => normal_ordered(&[(0.0, 0.5, "dd"), (0.0, -0.5, "aa")]),
        // Q³ = (a†³ + 3a†²a + 3a†a² + a³ + 3a† + 3a)/(2√2)
        "q3" => {
            let c = 1.0 / (2.0 * r2);
            normal_ordered(&[
                (c, 0.0, "ddd"),
                (3.0 * c, 0.0, "dda"),
                (3.0 * c, 0.0, "daa"),
                (c, 0.0, "aaa"),
                (3.0 * c, 0.0, "d"),
                (3.0 * c, 0.0, "a"),
            ])
        }
        // P² = ½(−aa − a†a† + 2a†a + 1)
        "p2" => normal_ordered(&[(-0.5, 0.0, "aa"), (-0.5, 0.0, "dd"), (1.0, 0.0, "da"), (0.5, 0.0, "")]),
        _ => {
            return Err(Error::usage(format!(
                "unknown Hamiltonian `{name}` (known: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}

/// The full catalog of built-in Hamiltonians.
pub fn builtin_hamiltonians() -> Vec<(&'static str, LadderPolynomial)> {
    BUILTIN_NAMES
        .iter()
        .map(|&n| (n, builtin(n).expect("catalog names resolve")))
        .collect()
}

/// Resolves either a builtin name or a polynomial expression.
pub fn resolve(text: &str) -> Result<LadderPolynomial> {
    let trimmed = text.trim();
    if BUILTIN_NAMES.contains(&trimmed) {
        return builtin(trimmed);
    }
    parse_polynomial(trimmed)
}
