//! Distance-1 decision in polynomial time.
//!
//! The distance between two initial distributions is strictly below 1 exactly
//! when some state `r1` carries equivalent couplings into the set of partner
//! states jointly reachable with it: compute the product-graph reachability
//! set `R` seeded from `supp(pi1) x supp(pi2)`, then for each `r1` test by
//! linear programming whether there are `mu1 >= 0` with `mu1(r1) = 1` and
//! `mu2 >= 0` supported on `R_{r1}` that are language equivalent. The
//! `mu1(r1) = 1` normalization is lossless because the constraint set is
//! positively homogeneous.

use crate::linalg::{equivalence_basis, EquivalenceBasis};
use crate::lp::feasible_point;
use crate::model::ProblemInstance;
use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::collections::VecDeque;

/// Pairs of states jointly reachable by a common word, one per chain.
#[derive(Debug, Clone)]
pub struct ReachSet {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl ReachSet {
    pub fn contains(&self, r1: usize, r2: usize) -> bool {
        self.pairs.contains(&(r1, r2))
    }

    /// The projection `R_{r1} = { r2 | (r1, r2) in R }`, in state order.
    pub fn targets_of(&self, r1: usize) -> Vec<usize> {
        self.pairs
            .range((r1, 0)..=(r1, self.n.saturating_sub(1)))
            .map(|&(_, r2)| r2)
            .collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Breadth-first closure over the product graph: `(q1, q2) -> (r1, r2)` is an
/// edge iff some letter moves `q1 -> r1` and `q2 -> r2` with positive
/// probability, seeded from `supp(pi1) x supp(pi2)`.
pub fn reach_set(inst: &ProblemInstance) -> ReachSet {
    let lmc = inst.lmc();
    let n = lmc.num_states();
    let mut pairs = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &q1 in &inst.pi1().support() {
        for &q2 in &inst.pi2().support() {
            if pairs.insert((q1, q2)) {
                queue.push_back((q1, q2));
            }
        }
    }
    while let Some((q1, q2)) = queue.pop_front() {
        for a in 0..lmc.num_letters() {
            let mat = lmc.matrix(a);
            for (r1, p1) in mat[q1].iter().enumerate() {
                if p1.is_zero() {
                    continue;
                }
                for (r2, p2) in mat[q2].iter().enumerate() {
                    if p2.is_zero() {
                        continue;
                    }
                    if pairs.insert((r1, r2)) {
                        queue.push_back((r1, r2));
                    }
                }
            }
        }
    }
    ReachSet { n, pairs }
}

/// Feasibility of an equivalent coupling pinned at `r1`: is there `mu1 >= 0`
/// over all states with `mu1(r1) = 1` and `mu2 >= 0` over `targets` such that
/// `(mu1 mu2)` is orthogonal to every basis vector?
pub fn coupling_feasible(r1: usize, targets: &[usize], basis: &EquivalenceBasis) -> bool {
    let n = basis.dim() / 2;
    assert!(r1 < n, "state index out of range");
    let nvars = n + targets.len();
    let mut constraints = Vec::with_capacity(1 + basis.len());
    let mut rhs = Vec::with_capacity(1 + basis.len());

    let mut pin = vec![Rational::zero(); nvars];
    pin[r1] = Rational::one();
    constraints.push(pin);
    rhs.push(Rational::one());

    for b in basis.vectors() {
        let mut row = Vec::with_capacity(nvars);
        row.extend_from_slice(&b[..n]);
        row.extend(targets.iter().map(|&q| b[n + q].clone()));
        constraints.push(row);
        rhs.push(Rational::zero());
    }
    feasible_point(&constraints, &rhs).is_some()
}

/// Decides whether `d(pi1, pi2) = 1`.
pub fn distance_one(inst: &ProblemInstance) -> bool {
    let basis = equivalence_basis(inst.lmc());
    distance_one_with(inst, &basis)
}

/// Same as [`distance_one`] with a precomputed basis. Candidate states are
/// tried in declaration order with early exit on the first feasible coupling;
/// the result is the same in any order.
pub fn distance_one_with(inst: &ProblemInstance, basis: &EquivalenceBasis) -> bool {
    let reach = reach_set(inst);
    let n = inst.lmc().num_states();
    for r1 in 0..n {
        let targets = reach.targets_of(r1);
        if coupling_feasible(r1, &targets, basis) {
            return false;
        }
    }
    true
}
