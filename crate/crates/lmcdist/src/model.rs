//! Labelled Markov chain model.
//!
//! A chain has a finite state set `Q`, a finite alphabet, and one `|Q| x |Q|`
//! rational matrix per letter; the sum of all letter matrices must be
//! stochastic (every row sums to exactly 1). A [`SubDistribution`] assigns
//! nonnegative weights to states with total mass at most 1, and the word
//! dynamics `mu -> mu * M(a)` drive everything else in the crate.
//!
//! All types here are immutable after construction and all operations are
//! pure functions, so shared instances can be read concurrently.

use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

/// Errors from model construction and the word dynamics.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("letter index {index} out of range (alphabet has {count} letters)")]
    UnknownLetter { index: usize, count: usize },
    #[error("alphabets differ: [{0}] vs [{1}]")]
    AlphabetMismatch(String, String),
    #[error("negative weight {weight} for state `{state}`")]
    NegativeWeight { state: String, weight: Rational },
    #[error("total mass {0} exceeds 1")]
    MassExceedsOne(Rational),
    #[error("{which} must have mass exactly 1, got {mass}")]
    InitialMassNotOne { which: &'static str, mass: Rational },
    #[error("weight vector has {got} entries, chain has {expected} states")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid chain: {0}")]
    InvalidChain(Box<ValidationError>),
}

/// A single stochasticity violation found by [`Lmc::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("state `{state}`: outgoing probabilities sum to {row_sum}, expected 1")]
    NotStochastic { state: String, row_sum: Rational },
    #[error("negative probability {value} on `{state} {letter} {target}`")]
    NegativeProbability {
        state: String,
        letter: String,
        target: String,
        value: Rational,
    },
}

/// Outcome of validating a chain: empty error list means the chain is a
/// well-formed LMC.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<ValidationError>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// A labelled Markov chain: states, alphabet, and one transition matrix per
/// letter. State and letter order is declaration order and fixes the meaning
/// of all indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lmc {
    states: Vec<String>,
    alphabet: Vec<String>,
    state_index: HashMap<String, usize>,
    letter_index: HashMap<String, usize>,
    /// `matrices[letter][from][to]`
    matrices: Vec<Vec<Vec<Rational>>>,
}

impl Lmc {
    /// Creates a chain with all transition probabilities zero. Use
    /// [`Lmc::set_prob`] to fill it in and [`Lmc::validate`] to check it.
    pub fn new(states: Vec<String>, alphabet: Vec<String>) -> Result<Self, ModelError> {
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let mut letter_index = HashMap::new();
        for (i, a) in alphabet.iter().enumerate() {
            if letter_index.insert(a.clone(), i).is_some() {
                return Err(ModelError::DuplicateLetter(a.clone()));
            }
        }
        let n = states.len();
        let matrices = vec![vec![vec![Rational::zero(); n]; n]; alphabet.len()];
        Ok(Lmc {
            states,
            alphabet,
            state_index,
            letter_index,
            matrices,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn letter_name(&self, a: usize) -> &str {
        &self.alphabet[a]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letter_index.get(name).copied()
    }

    /// Transition probability of emitting `letter` and moving `from -> to`.
    pub fn prob(&self, letter: usize, from: usize, to: usize) -> &Rational {
        &self.matrices[letter][from][to]
    }

    /// The full matrix for one letter, rows indexed by source state.
    pub fn matrix(&self, letter: usize) -> &[Vec<Rational>] {
        &self.matrices[letter]
    }

    pub fn set_prob(&mut self, from: usize, letter: usize, to: usize, p: Rational) {
        self.matrices[letter][from][to] = p;
    }

    /// Checks that every entry is nonnegative and that for every state the
    /// outgoing probabilities over all letters sum to exactly 1.
    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        for from in 0..self.num_states() {
            let mut row_sum = Rational::zero();
            for letter in 0..self.num_letters() {
                for to in 0..self.num_states() {
                    let p = &self.matrices[letter][from][to];
                    if p < &Rational::zero() {
                        errors.push(ValidationError::NegativeProbability {
                            state: self.states[from].clone(),
                            letter: self.alphabet[letter].clone(),
                            target: self.states[to].clone(),
                            value: p.clone(),
                        });
                    }
                    row_sum += p;
                }
            }
            if !row_sum.is_one() {
                errors.push(ValidationError::NotStochastic {
                    state: self.states[from].clone(),
                    row_sum,
                });
            }
        }
        ValidationReport { errors }
    }

    /// One step of the word dynamics: returns `mu * M(letter)`.
    pub fn step(&self, mu: &SubDistribution, letter: usize) -> Result<SubDistribution, ModelError> {
        if letter >= self.num_letters() {
            return Err(ModelError::UnknownLetter {
                index: letter,
                count: self.num_letters(),
            });
        }
        assert_eq!(
            mu.len(),
            self.num_states(),
            "subdistribution dimension must match the chain"
        );
        let weights = vec_mat_mul(mu.weights(), &self.matrices[letter]);
        Ok(SubDistribution::from_weights_unchecked(weights))
    }

    /// Left-to-right fold of [`Lmc::step`]; the mass of the result is the
    /// probability of emitting `word` when `mu` is an initial distribution.
    pub fn apply_word(
        &self,
        mu: &SubDistribution,
        word: &[usize],
    ) -> Result<SubDistribution, ModelError> {
        let mut current = mu.clone();
        for &letter in word {
            current = self.step(&current, letter)?;
        }
        Ok(current)
    }
}

/// `v * M` for a row vector `v`, skipping zero entries.
pub(crate) fn vec_mat_mul(v: &[Rational], mat: &[Vec<Rational>]) -> Vec<Rational> {
    let n = mat.first().map_or(0, Vec::len);
    let mut out = vec![Rational::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, m) in mat[i].iter().enumerate() {
            if !m.is_zero() {
                out[j] += vi * m;
            }
        }
    }
    out
}

/// Nonnegative weights over the states of a chain with total mass at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubDistribution {
    weights: Vec<Rational>,
}

impl SubDistribution {
    /// The zero subdistribution over `n` states.
    pub fn zero(n: usize) -> Self {
        SubDistribution {
            weights: vec![Rational::zero(); n],
        }
    }

    /// The Dirac distribution concentrated on state `q`.
    pub fn dirac(n: usize, q: usize) -> Self {
        assert!(q < n, "state index out of range");
        let mut weights = vec![Rational::zero(); n];
        weights[q] = Rational::one();
        SubDistribution { weights }
    }

    /// Validates nonnegativity and mass at most 1.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self, ModelError> {
        let mut mass = Rational::zero();
        for (i, w) in weights.iter().enumerate() {
            if w < &Rational::zero() {
                return Err(ModelError::NegativeWeight {
                    state: format!("#{i}"),
                    weight: w.clone(),
                });
            }
            mass += w;
        }
        if mass > Rational::one() {
            return Err(ModelError::MassExceedsOne(mass));
        }
        Ok(SubDistribution { weights })
    }

    pub(crate) fn from_weights_unchecked(weights: Vec<Rational>) -> Self {
        SubDistribution { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, q: usize) -> &Rational {
        &self.weights[q]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Total mass `|mu|`.
    pub fn mass(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// States with strictly positive weight, in index order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&q| !self.weights[q].is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }

    /// Componentwise scaling; callers must keep the result a subdistribution.
    pub(crate) fn scaled(&self, factor: &Rational) -> Self {
        SubDistribution {
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }
}

/// A chain together with two initial distributions; the object all deciders
/// and approximators operate on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    lmc: Lmc,
    pi1: SubDistribution,
    pi2: SubDistribution,
}

impl ProblemInstance {
    /// Validates the chain and requires both initial distributions to have
    /// mass exactly 1.
    pub fn new(lmc: Lmc, pi1: SubDistribution, pi2: SubDistribution) -> Result<Self, ModelError> {
        let report = lmc.validate();
        if let Some(first) = report.errors.into_iter().next() {
            return Err(ModelError::InvalidChain(Box::new(first)));
        }
        for (which, pi) in [("init1", &pi1), ("init2", &pi2)] {
            if pi.len() != lmc.num_states() {
                return Err(ModelError::DimensionMismatch {
                    expected: lmc.num_states(),
                    got: pi.len(),
                });
            }
            if pi.weights().iter().any(|w| w < &Rational::zero()) {
                let q = pi
                    .weights()
                    .iter()
                    .position(|w| w < &Rational::zero())
                    .unwrap();
                return Err(ModelError::NegativeWeight {
                    state: lmc.state_name(q).to_string(),
                    weight: pi.weight(q).clone(),
                });
            }
            let mass = pi.mass();
            if !mass.is_one() {
                return Err(ModelError::InitialMassNotOne { which, mass });
            }
        }
        Ok(ProblemInstance { lmc, pi1, pi2 })
    }

    pub fn lmc(&self) -> &Lmc {
        &self.lmc
    }

    pub fn pi1(&self) -> &SubDistribution {
        &self.pi1
    }

    pub fn pi2(&self) -> &SubDistribution {
        &self.pi2
    }

    /// Same chain with different initial distributions.
    pub fn with_initials(
        &self,
        pi1: SubDistribution,
        pi2: SubDistribution,
    ) -> Result<Self, ModelError> {
        ProblemInstance::new(self.lmc.clone(), pi1, pi2)
    }
}

/// Combines two chains over the same alphabet into a single chain on the
/// disjoint union of their state sets, with block-diagonal matrices and the
/// initial distributions embedded in their blocks.
///
/// Colliding state names from the second chain get a `_2` suffix (repeated
/// until fresh), so the union is always well-formed.
pub fn disjoint_union(
    lmc1: &Lmc,
    pi1: &SubDistribution,
    lmc2: &Lmc,
    pi2: &SubDistribution,
) -> Result<ProblemInstance, ModelError> {
    if lmc1.alphabet() != lmc2.alphabet() {
        return Err(ModelError::AlphabetMismatch(
            lmc1.alphabet().join(" "),
            lmc2.alphabet().join(" "),
        ));
    }
    let n1 = lmc1.num_states();
    let n2 = lmc2.num_states();
    let mut names: Vec<String> = lmc1.states().to_vec();
    for s in lmc2.states() {
        let mut candidate = s.clone();
        while names.contains(&candidate) {
            candidate.push_str("_2");
        }
        names.push(candidate);
    }
    let mut union = Lmc::new(names, lmc1.alphabet().to_vec())?;
    for a in 0..lmc1.num_letters() {
        for from in 0..n1 {
            for to in 0..n1 {
                union.set_prob(from, a, to, lmc1.prob(a, from, to).clone());
            }
        }
        for from in 0..n2 {
            for to in 0..n2 {
                union.set_prob(n1 + from, a, n1 + to, lmc2.prob(a, from, to).clone());
            }
        }
    }
    let mut w1 = pi1.weights().to_vec();
    w1.extend(vec![Rational::zero(); n2]);
    let mut w2 = vec![Rational::zero(); n1];
    w2.extend_from_slice(pi2.weights());
    ProblemInstance::new(
        union,
        SubDistribution::from_weights(w1)?,
        SubDistribution::from_weights(w2)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{self, GadgetSpec};
    use crate::rational::{int, rat};

    fn example_halves() -> (Lmc, Lmc) {
        // Left chain: q1 with self-loops 1/2 a, 1/4 b and 1/4 c to r1; r1 loops on c.
        let mut left = Lmc::new(
            vec!["q1".into(), "r1".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        left.set_prob(0, 0, 0, rat(1, 2));
        left.set_prob(0, 1, 0, rat(1, 4));
        left.set_prob(0, 2, 1, rat(1, 4));
        left.set_prob(1, 2, 1, int(1));
        let mut right = Lmc::new(
            vec!["q2".into(), "r2".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        right.set_prob(0, 0, 0, rat(1, 4));
        right.set_prob(0, 1, 0, rat(1, 2));
        right.set_prob(0, 2, 1, rat(1, 4));
        right.set_prob(1, 2, 1, int(1));
        (left, right)
    }

    #[test]
    fn step_follows_the_matrices() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let q1 = lmc.state_index("q1").unwrap();
        let r1 = lmc.state_index("r1").unwrap();
        let a = lmc.letter_index("a").unwrap();
        let c = lmc.letter_index("c").unwrap();

        let after_a = lmc.step(&SubDistribution::dirac(4, q1), a).unwrap();
        assert_eq!(after_a.weight(q1), &rat(1, 2));
        assert_eq!(after_a.mass(), rat(1, 2));

        let after_c = lmc.step(&SubDistribution::dirac(4, r1), c).unwrap();
        assert_eq!(after_c.weight(r1), &int(1));

        let zero = lmc.step(&SubDistribution::zero(4), a).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn step_rejects_unknown_letters() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        let err = inst
            .lmc()
            .step(&SubDistribution::dirac(2, 0), 5)
            .unwrap_err();
        assert!(matches!(err, ModelError::UnknownLetter { index: 5, .. }));
    }

    #[test]
    fn apply_word_gives_prefix_masses() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let word: Vec<usize> = ["a", "c"]
            .iter()
            .map(|l| lmc.letter_index(l).unwrap())
            .collect();
        let from_q1 = lmc.apply_word(inst.pi1(), &word).unwrap();
        assert_eq!(from_q1.mass(), rat(1, 8));
        assert_eq!(from_q1.weight(lmc.state_index("r1").unwrap()), &rat(1, 8));
        let from_q2 = lmc.apply_word(inst.pi2(), &word).unwrap();
        assert_eq!(from_q2.mass(), rat(1, 16));

        let unchanged = lmc.apply_word(inst.pi1(), &[]).unwrap();
        assert_eq!(&unchanged, inst.pi1());
    }

    #[test]
    fn word_splits_compose() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        let lmc = inst.lmc();
        let word = [0, 1, 1, 0, 1];
        for split in 0..=word.len() {
            let (u, v) = word.split_at(split);
            let two_steps = lmc
                .apply_word(&lmc.apply_word(inst.pi1(), u).unwrap(), v)
                .unwrap();
            assert_eq!(two_steps, lmc.apply_word(inst.pi1(), &word).unwrap());
        }
    }

    #[test]
    fn mass_is_conserved_across_letters() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let mu = lmc.apply_word(inst.pi1(), &[0, 1]).unwrap();
        let total: Rational = (0..lmc.num_letters())
            .map(|a| lmc.step(&mu, a).unwrap().mass())
            .sum();
        assert_eq!(total, mu.mass());
    }

    #[test]
    fn validation_accepts_the_irrational_gadget() {
        let inst = gadgets::generate(&GadgetSpec::Irrational(rat(1, 4)))
            .unwrap()
            .instance;
        assert!(inst.lmc().validate().is_ok());
    }

    #[test]
    fn validation_reports_bad_rows() {
        let mut lmc = Lmc::new(vec!["s".into()], vec!["a".into()]).unwrap();
        lmc.set_prob(0, 0, 0, rat(3, 4));
        let report = lmc.validate();
        assert_eq!(report.errors.len(), 1);
        assert!(matches!(
            &report.errors[0],
            ValidationError::NotStochastic { row_sum, .. } if *row_sum == rat(3, 4)
        ));

        let mut lmc = Lmc::new(vec!["s".into(), "t".into()], vec!["a".into()]).unwrap();
        lmc.set_prob(0, 0, 0, rat(9, 8));
        lmc.set_prob(0, 0, 1, rat(-1, 8));
        lmc.set_prob(1, 0, 1, int(1));
        let report = lmc.validate();
        assert!(report
            .errors
            .iter()
            .any(|e| matches!(e, ValidationError::NegativeProbability { value, .. } if *value == rat(-1, 8))));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        assert!(matches!(
            Lmc::new(vec!["s".into(), "s".into()], vec!["a".into()]),
            Err(ModelError::DuplicateState(_))
        ));
        assert!(matches!(
            Lmc::new(vec!["s".into()], vec!["a".into(), "a".into()]),
            Err(ModelError::DuplicateLetter(_))
        ));
    }

    #[test]
    fn union_of_the_two_example_chains() {
        let (left, right) = example_halves();
        let inst = disjoint_union(
            &left,
            &SubDistribution::dirac(2, 0),
            &right,
            &SubDistribution::dirac(2, 0),
        )
        .unwrap();
        assert_eq!(inst.lmc().num_states(), 4);
        assert!(inst.lmc().validate().is_ok());
        assert_eq!(inst.pi1().support(), vec![0]);
        assert_eq!(inst.pi2().support(), vec![2]);
    }

    #[test]
    fn union_with_a_copy_of_itself_renames() {
        let (left, _) = example_halves();
        let inst = disjoint_union(
            &left,
            &SubDistribution::dirac(2, 0),
            &left,
            &SubDistribution::dirac(2, 0),
        )
        .unwrap();
        assert_eq!(inst.lmc().num_states(), 4);
        assert!(inst.lmc().validate().is_ok());
        assert_eq!(inst.lmc().state_name(2), "q1_2");
    }

    #[test]
    fn union_requires_matching_alphabets() {
        let a = Lmc::new(vec!["s".into()], vec!["a".into(), "b".into()]).unwrap();
        let b = Lmc::new(vec!["t".into()], vec!["a".into(), "c".into()]).unwrap();
        let err = disjoint_union(
            &a,
            &SubDistribution::dirac(1, 0),
            &b,
            &SubDistribution::dirac(1, 0),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::AlphabetMismatch(..)));
    }

    #[test]
    fn instance_requires_unit_mass() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        let half = SubDistribution::from_weights(vec![rat(1, 2), Rational::zero()]).unwrap();
        let err = inst.with_initials(half, inst.pi2().clone()).unwrap_err();
        assert!(matches!(err, ModelError::InitialMassNotOne { .. }));
    }
}
