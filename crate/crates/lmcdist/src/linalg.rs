//! Language equivalence over exact rationals.
//!
//! Two subdistributions are language equivalent when they give every finite
//! word the same prefix mass. That holds if and only if the glued row vector
//! `(mu1 mu2)` is orthogonal to every vector in the finite basis computed
//! here: the span of `blockdiag(M(w), M(w)) * eta` over all words `w`, where
//! `eta = (1,...,1,-1,...,-1)^T`. The basis has at most `2|Q|` vectors and is
//! computed by a worklist closure under the per-letter matrices, with exact
//! Gaussian elimination as the independence test.

use crate::model::{Lmc, ProblemInstance, SubDistribution};
use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::VecDeque;
use thiserror::Error;

/// Default cap on `|Sigma|^(2|Q|)` for the brute-force word check.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("basis has dimension {basis_dim}, subdistributions have {vector_dim} states")]
    DimensionMismatch { basis_dim: usize, vector_dim: usize },
    #[error("instance too large for brute force: needs {words} words, cap is {cap}")]
    TooLarge { words: u128, cap: u128 },
}

/// Row-echelon set used as an exact independence test. Rows keep distinct
/// pivot columns and are stored sorted by pivot.
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Reduces `v` against the current rows; if a nonzero remainder survives,
    /// stores it and reports independence.
    fn insert(&mut self, v: &[Rational]) -> bool {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let factor = &v[*pivot] / &row[*pivot];
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= &factor * ri;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(pivot) => {
                let at = self
                    .rows
                    .binary_search_by_key(&pivot, |(p, _)| *p)
                    .unwrap_err();
                self.rows.insert(at, (pivot, v));
                true
            }
        }
    }
}

/// A basis of the word-functional space of a chain. Orthogonality of the
/// glued vector `(mu1 mu2)` to every basis vector characterizes language
/// equivalence of `mu1` and `mu2`.
#[derive(Debug, Clone)]
pub struct EquivalenceBasis {
    vectors: Vec<Vec<Rational>>,
    dim: usize,
}

impl EquivalenceBasis {
    /// The basis vectors, each of length `2|Q|`, in deterministic order.
    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `2|Q|` for the chain the basis was computed from.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True iff `(mu1 mu2) . b = 0` for every basis vector `b`, i.e. iff the
    /// two subdistributions are language equivalent.
    pub fn is_equivalent(
        &self,
        mu1: &SubDistribution,
        mu2: &SubDistribution,
    ) -> Result<bool, LinalgError> {
        let n = self.dim / 2;
        if mu1.len() != n || mu2.len() != n {
            return Err(LinalgError::DimensionMismatch {
                basis_dim: self.dim,
                vector_dim: mu1.len().max(mu2.len()),
            });
        }
        Ok(self
            .vectors
            .iter()
            .all(|b| glued_dot(mu1.weights(), mu2.weights(), b).is_zero()))
    }
}

pub(crate) fn glued_dot(mu1: &[Rational], mu2: &[Rational], b: &[Rational]) -> Rational {
    let n = mu1.len();
    let mut acc = Rational::zero();
    for (w, bi) in mu1.iter().zip(&b[..n]) {
        if !w.is_zero() && !bi.is_zero() {
            acc += w * bi;
        }
    }
    for (w, bi) in mu2.iter().zip(&b[n..]) {
        if !w.is_zero() && !bi.is_zero() {
            acc += w * bi;
        }
    }
    acc
}

/// `blockdiag(M, M) * v` for a column vector `v` of length `2|Q|`.
fn blockdiag_mul(mat: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let n = mat.len();
    let mut out = vec![Rational::zero(); 2 * n];
    for q in 0..n {
        for (qp, m) in mat[q].iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            if !v[qp].is_zero() {
                out[q] += m * &v[qp];
            }
            if !v[n + qp].is_zero() {
                out[n + q] += m * &v[n + qp];
            }
        }
    }
    out
}

/// Computes the equivalence basis of a chain.
///
/// Worklist closure: seed with `eta`, close under left multiplication by
/// `blockdiag(M(a), M(a))` for each letter in alphabet order (FIFO), keeping
/// only vectors independent of the set so far. Deterministic: same chain,
/// same vectors in the same order.
pub fn equivalence_basis(lmc: &Lmc) -> EquivalenceBasis {
    let n = lmc.num_states();
    let dim = 2 * n;
    let mut eta = vec![Rational::one(); dim];
    for e in eta.iter_mut().skip(n) {
        *e = -Rational::one();
    }

    let mut echelon = Echelon::new();
    let mut vectors = Vec::new();
    let mut queue = VecDeque::new();
    if echelon.insert(&eta) {
        vectors.push(eta.clone());
        queue.push_back(eta);
    }
    while let Some(v) = queue.pop_front() {
        for a in 0..lmc.num_letters() {
            let next = blockdiag_mul(lmc.matrix(a), &v);
            if echelon.insert(&next) {
                vectors.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    debug_assert!(vectors.len() <= dim);
    EquivalenceBasis { vectors, dim }
}

/// Word-enumeration oracle for equivalence: `mu1` and `mu2` are equivalent
/// iff their prefix masses agree on every word of length exactly `2|Q|`.
/// Intended for small instances; fails with [`LinalgError::TooLarge`] when
/// `|Sigma|^(2|Q|)` exceeds `cap`.
pub fn is_equivalent_bruteforce(
    mu1: &SubDistribution,
    mu2: &SubDistribution,
    lmc: &Lmc,
    cap: u64,
) -> Result<bool, LinalgError> {
    let depth = 2 * lmc.num_states();
    let words = (lmc.num_letters() as u128)
        .checked_pow(depth as u32)
        .unwrap_or(u128::MAX);
    if words > cap as u128 {
        return Err(LinalgError::TooLarge {
            words,
            cap: cap as u128,
        });
    }

    fn walk(lmc: &Lmc, mu1: &SubDistribution, mu2: &SubDistribution, depth: usize) -> bool {
        if depth == 0 {
            return mu1.mass() == mu2.mass();
        }
        (0..lmc.num_letters()).all(|a| {
            let next1 = lmc.step(mu1, a).expect("letter in range");
            let next2 = lmc.step(mu2, a).expect("letter in range");
            walk(lmc, &next1, &next2, depth - 1)
        })
    }

    Ok(walk(lmc, mu1, mu2, depth))
}

/// Distance-0 decision: the two initial distributions have total variation
/// distance 0 iff they are language equivalent.
pub fn distance_zero(inst: &ProblemInstance) -> bool {
    let basis = equivalence_basis(inst.lmc());
    distance_zero_with(inst, &basis)
}

/// Same as [`distance_zero`] with a precomputed basis.
pub fn distance_zero_with(inst: &ProblemInstance, basis: &EquivalenceBasis) -> bool {
    basis
        .is_equivalent(inst.pi1(), inst.pi2())
        .expect("basis computed from the same chain")
}
