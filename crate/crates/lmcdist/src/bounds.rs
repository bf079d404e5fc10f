//! Certified rational brackets around the total variation distance.
//!
//! For each depth `k`, summing `min(|pi1^w|, |pi2^w|)` over all length-`k`
//! words gives `min(k)`, and summing the largest mass of equivalently coupled
//! sub-masses gives `con(k)`. These sandwich the distance:
//! `1 - min(k) <= d(pi1, pi2) <= 1 - con(k)`, the lower bounds are
//! nondecreasing, the upper bounds nonincreasing, and both converge to the
//! distance. All arithmetic is exact, so every reported bracket is a
//! certificate.
//!
//! Enumerating words directly is exponential, so words are aggregated into
//! [`PrefixClass`]es: pairs `(pi1^w, pi2^w)` are normalized to combined mass
//! 1 and words with identical normalized pairs are collapsed, with the scale
//! folded into a weight. Both `min` and the coupling LP optimum are
//! positively homogeneous, so the aggregation is exact. On self-similar
//! chains this keeps the class count linear in the depth instead of
//! exponential; in the worst case it degrades gracefully to per-word
//! enumeration.

use crate::dist_one::distance_one_with;
use crate::linalg::{distance_zero_with, equivalence_basis, EquivalenceBasis};
use crate::lp::{maximize, LinearProgram, LpOutcome};
use crate::model::{vec_mat_mul, Lmc, ProblemInstance, SubDistribution};
use crate::rational::{format_rational, Rational};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default depth cap for [`approximate`].
pub const DEFAULT_MAX_DEPTH: usize = 30;

/// Number of classes above which the per-class coupling LPs run in parallel.
const PARALLEL_THRESHOLD: usize = 32;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(String),
}

/// One aggregated bundle of depth-`k` words: the shared normalized pair and
/// the total combined mass of the words collapsed into it.
#[derive(Debug, Clone)]
pub struct PrefixClass {
    pub pair1: SubDistribution,
    pub pair2: SubDistribution,
    pub weight: Rational,
}

/// Certified enclosure of the distance at a given depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub lower: Rational,
    pub upper: Rational,
    pub depth: usize,
}

impl Bracket {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxStatus {
    /// A decision procedure settled the distance exactly (0 or 1).
    Exact,
    /// The bracket narrowed to the requested width.
    Converged,
    /// The depth cap was reached; the bracket is still sound.
    DepthCapped,
}

impl std::fmt::Display for ApproxStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ApproxStatus::Exact => "Exact",
            ApproxStatus::Converged => "Converged",
            ApproxStatus::DepthCapped => "DepthCapped",
        };
        f.write_str(s)
    }
}

/// Result of [`approximate`]: the final bracket, why iteration stopped, and
/// the bracket at every visited depth (nested by construction).
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub bracket: Bracket,
    pub status: ApproxStatus,
    pub history: Vec<Bracket>,
}

/// The single depth-0 class holding `(pi1, pi2)` normalized to combined
/// mass 1; its weight is the combined mass 2.
pub fn initial_classes(inst: &ProblemInstance) -> Vec<PrefixClass> {
    let combined = inst.pi1().mass() + inst.pi2().mass();
    debug_assert_eq!(combined, Rational::from_integer(2.into()));
    let half = combined.recip();
    vec![PrefixClass {
        pair1: inst.pi1().scaled(&half),
        pair2: inst.pi2().scaled(&half),
        weight: combined,
    }]
}

/// Extends every class by every letter, prunes extensions where both
/// components die, renormalizes survivors to combined mass 1 folding the
/// scale into the weight, and merges classes with identical normalized pairs.
/// The result is deterministic (classes sorted by their normalized pair).
pub fn refine_classes(classes: &[PrefixClass], lmc: &Lmc) -> Vec<PrefixClass> {
    let mut merged: BTreeMap<(Vec<Rational>, Vec<Rational>), Rational> = BTreeMap::new();
    for class in classes {
        for a in 0..lmc.num_letters() {
            let w1 = vec_mat_mul(class.pair1.weights(), lmc.matrix(a));
            let w2 = vec_mat_mul(class.pair2.weights(), lmc.matrix(a));
            let combined: Rational = w1.iter().sum::<Rational>() + w2.iter().sum::<Rational>();
            if combined.is_zero() {
                continue;
            }
            let v1: Vec<Rational> = w1.iter().map(|x| x / &combined).collect();
            let v2: Vec<Rational> = w2.iter().map(|x| x / &combined).collect();
            let weight = &class.weight * &combined;
            *merged.entry((v1, v2)).or_insert_with(Rational::zero) += weight;
        }
    }
    merged
        .into_iter()
        .map(|((v1, v2), weight)| PrefixClass {
            pair1: SubDistribution::from_weights_unchecked(v1),
            pair2: SubDistribution::from_weights_unchecked(v2),
            weight,
        })
        .collect()
}

/// `min` and coupling contribution of one normalized class.
///
/// The coupling part is the optimum of: maximize `|mu1|` subject to
/// `0 <= mu1 <= pair1`, `0 <= mu2 <= pair2`, and `(mu1 mu2)` orthogonal to
/// every basis vector. When one pair dominates the other componentwise the
/// identical coupling `mu1 = mu2 = min(pair1, pair2)` is optimal and the LP
/// is skipped.
fn class_parts(class: &PrefixClass, basis: &EquivalenceBasis) -> (Rational, Rational) {
    let m1 = class.pair1.mass();
    let m2 = class.pair2.mass();
    let min_part = m1.clone().min(m2.clone());

    let dominated = class
        .pair1
        .weights()
        .iter()
        .zip(class.pair2.weights())
        .all(|(x, y)| x <= y)
        || class
            .pair1
            .weights()
            .iter()
            .zip(class.pair2.weights())
            .all(|(x, y)| x >= y);
    let con_part = if dominated {
        min_part.clone()
    } else {
        coupling_optimum(&class.pair1, &class.pair2, basis)
    };

    assert!(con_part >= Rational::zero(), "coupling part must be >= 0");
    assert!(
        con_part <= min_part,
        "coupling part exceeds min part: {} > {}",
        con_part,
        min_part
    );
    assert!(min_part <= Rational::one(), "min part exceeds 1");
    (min_part, con_part)
}

/// Exact coupling LP for one pair, with variables restricted to the supports
/// and the bound constraints turned into equalities with slack variables.
fn coupling_optimum(
    pair1: &SubDistribution,
    pair2: &SubDistribution,
    basis: &EquivalenceBasis,
) -> Rational {
    let n = basis.dim() / 2;
    let supp1 = pair1.support();
    let supp2 = pair2.support();
    let (n1, n2) = (supp1.len(), supp2.len());
    // Layout: mu1 | mu2 | slack1 | slack2.
    let nvars = 2 * (n1 + n2);
    let mut constraints = Vec::with_capacity(n1 + n2 + basis.len());
    let mut rhs = Vec::with_capacity(n1 + n2 + basis.len());
    for (i, &q) in supp1.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        row[i] = Rational::one();
        row[n1 + n2 + i] = Rational::one();
        constraints.push(row);
        rhs.push(pair1.weight(q).clone());
    }
    for (j, &q) in supp2.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        row[n1 + j] = Rational::one();
        row[n1 + n2 + n1 + j] = Rational::one();
        constraints.push(row);
        rhs.push(pair2.weight(q).clone());
    }
    for b in basis.vectors() {
        let mut row = vec![Rational::zero(); nvars];
        for (i, &q) in supp1.iter().enumerate() {
            row[i] = b[q].clone();
        }
        for (j, &q) in supp2.iter().enumerate() {
            row[n1 + j] = b[n + q].clone();
        }
        constraints.push(row);
        rhs.push(Rational::zero());
    }
    let mut objective = vec![Rational::zero(); nvars];
    for slot in objective.iter_mut().take(n1) {
        *slot = Rational::one();
    }
    match maximize(&LinearProgram {
        objective,
        constraints,
        rhs,
    }) {
        LpOutcome::Optimal { value, .. } => value,
        // mu = 0 is always feasible and the objective is bounded by |pair1|.
        other => unreachable!("coupling LP must be optimal, got {other:?}"),
    }
}

/// Level sums: `min(k)` and `con(k)` over a set of same-depth classes.
pub fn level_bounds(classes: &[PrefixClass], basis: &EquivalenceBasis) -> (Rational, Rational) {
    let parts: Vec<(Rational, Rational)> = if classes.len() >= PARALLEL_THRESHOLD {
        classes.par_iter().map(|c| class_parts(c, basis)).collect()
    } else {
        classes.iter().map(|c| class_parts(c, basis)).collect()
    };
    let mut min_k = Rational::zero();
    let mut con_k = Rational::zero();
    for (class, (min_part, con_part)) in classes.iter().zip(parts) {
        min_k += &class.weight * min_part;
        con_k += &class.weight * con_part;
    }
    (min_k, con_k)
}

/// Depth-by-depth driver over the aggregated classes. Exposes the exact
/// per-level bounds; [`approximate`] wraps it with the fast paths and the
/// stopping rule.
pub struct Refiner<'a> {
    lmc: &'a Lmc,
    basis: &'a EquivalenceBasis,
    classes: Vec<PrefixClass>,
    depth: usize,
}

impl<'a> Refiner<'a> {
    pub fn new(inst: &'a ProblemInstance, basis: &'a EquivalenceBasis) -> Self {
        Refiner {
            lmc: inst.lmc(),
            basis,
            classes: initial_classes(inst),
            depth: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn classes(&self) -> &[PrefixClass] {
        &self.classes
    }

    /// `(min(k), con(k))` at the current depth.
    pub fn level_bounds(&self) -> (Rational, Rational) {
        level_bounds(&self.classes, self.basis)
    }

    /// The bracket `[1 - min(k), 1 - con(k)]` at the current depth.
    pub fn bracket(&self) -> Bracket {
        let (min_k, con_k) = self.level_bounds();
        let bracket = Bracket {
            lower: Rational::one() - min_k,
            upper: Rational::one() - con_k,
            depth: self.depth,
        };
        assert!(bracket.lower >= Rational::zero() && bracket.lower <= bracket.upper);
        assert!(bracket.upper <= Rational::one());
        bracket
    }

    /// Advances to the next depth.
    pub fn refine(&mut self) {
        self.classes = refine_classes(&self.classes, self.lmc);
        self.depth += 1;
    }
}

/// Anytime approximation of the distance.
///
/// Fast paths settle equivalent pairs as `[0, 0]` and distance-1 pairs as
/// `[1, 1]` (status `Exact`). Otherwise the bracket is refined depth by depth
/// until its width is at most `eps` (`Converged`) or the depth cap is hit
/// (`DepthCapped`, bracket still sound). The history holds every depth's
/// bracket.
pub fn approximate(
    inst: &ProblemInstance,
    eps: &Rational,
    max_depth: usize,
) -> Result<ApproxReport, BoundsError> {
    if *eps <= Rational::zero() {
        return Err(BoundsError::InvalidEpsilon(format_rational(eps)));
    }
    let basis = equivalence_basis(inst.lmc());
    if distance_zero_with(inst, &basis) {
        let bracket = Bracket {
            lower: Rational::zero(),
            upper: Rational::zero(),
            depth: 0,
        };
        return Ok(ApproxReport {
            bracket: bracket.clone(),
            status: ApproxStatus::Exact,
            history: vec![bracket],
        });
    }
    if distance_one_with(inst, &basis) {
        let bracket = Bracket {
            lower: Rational::one(),
            upper: Rational::one(),
            depth: 0,
        };
        return Ok(ApproxReport {
            bracket: bracket.clone(),
            status: ApproxStatus::Exact,
            history: vec![bracket],
        });
    }

    let mut refiner = Refiner::new(inst, &basis);
    let mut history = Vec::new();
    loop {
        let bracket = refiner.bracket();
        history.push(bracket.clone());
        if bracket.width() <= *eps {
            return Ok(ApproxReport {
                bracket,
                status: ApproxStatus::Converged,
                history,
            });
        }
        if refiner.depth() >= max_depth {
            return Ok(ApproxReport {
                bracket,
                status: ApproxStatus::DepthCapped,
                history,
            });
        }
        refiner.refine();
    }
}

/// Sound semi-decision of `d >= tau` by comparing against a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdVerdict {
    /// `tau <= lower`, so the distance is certainly >= tau.
    Above,
    /// `upper < tau`, so the distance is certainly < tau.
    Below,
    /// The bracket straddles tau; no decision at this depth.
    Undecided,
}

impl std::fmt::Display for ThresholdVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ThresholdVerdict::Above => "above",
            ThresholdVerdict::Below => "below",
            ThresholdVerdict::Undecided => "undecided",
        };
        f.write_str(s)
    }
}

pub fn threshold_verdict(bracket: &Bracket, tau: &Rational) -> ThresholdVerdict {
    if *tau <= bracket.lower {
        ThresholdVerdict::Above
    } else if bracket.upper < *tau {
        ThresholdVerdict::Below
    } else {
        ThresholdVerdict::Undecided
    }
}
