//! Generators for the example chain families and their closed-form distances.
//!
//! Each family builds a validated [`ProblemInstance`]; where the distance has
//! a closed form it is returned symbolically as a sum of terms `c * sqrt(r)`
//! with rational `c` and natural `r`, because the values are irrational in
//! general and comparisons against rational brackets must not go through
//! floating point.

use crate::model::{Lmc, ProblemInstance, SubDistribution};
use crate::rational::{format_rational, rational_to_f64, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

/// The chain families. Parameters mirror the generators:
///
/// * `Example1`: the two 2-state chains over `{a, b, c}` glued into one
///   4-state chain; distance `sqrt(2)/4`.
/// * `TwoState`: the 2-state chain over `{a, b}` whose states have
///   distance 1.
/// * `Irrational(x)`: the 3-state family with parameter `0 < x < 1/2` and
///   distance `(1/2) sqrt(2x)`.
/// * `Parallel(xs)`: `n` copies of `Irrational(x_i)` behind a fair first
///   letter; distance `(1/n) sum (1/2) sqrt(2 x_i)`.
/// * `BernoulliChain { theta, x }`: the 6-state family whose distance is
///   `1/2 + 1/2 f_theta(x)` for the Bernoulli-convolution fixed point
///   `f_theta` (no closed form; see the `bernoulli` module).
/// * `SqrtSum { s, t }`: the square-root-sum reduction instance: with
///   `h = 3 max s_i` and `x_i = 2 s_i / h^2`, the parallel chain has distance
///   `(1/(n h)) sum sqrt(s_i)`, which is `>= t/(n h)` iff `sum sqrt(s_i) >= t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetSpec {
    Example1,
    TwoState,
    Irrational(Rational),
    Parallel(Vec<Rational>),
    BernoulliChain { theta: Rational, x: Rational },
    SqrtSum { s: Vec<u64>, t: u64 },
}

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("no closed form for this family")]
    NoClosedForm,
}

/// A generated instance, plus the decision threshold for `SqrtSum`.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub instance: ProblemInstance,
    /// `t / (n h)` for `SqrtSum`; `None` for every other family.
    pub threshold: Option<Rational>,
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

fn check(cond: bool, msg: &str) -> Result<(), GadgetError> {
    if cond {
        Ok(())
    } else {
        Err(GadgetError::ParameterOutOfRange(msg.to_string()))
    }
}

/// Builds the instance for a family. Every generated chain passes
/// validation and carries the family's canonical initial distributions.
pub fn generate(spec: &GadgetSpec) -> Result<Gadget, GadgetError> {
    let instance = match spec {
        GadgetSpec::Example1 => example1(),
        GadgetSpec::TwoState => two_state(),
        GadgetSpec::Irrational(x) => {
            check(
                x > &Rational::zero() && x < &half(),
                "Irrational requires 0 < x < 1/2",
            )?;
            irrational(x)
        }
        GadgetSpec::Parallel(xs) => {
            check(!xs.is_empty(), "Parallel requires at least one parameter")?;
            for x in xs {
                check(
                    x > &Rational::zero() && x < &half(),
                    "Parallel requires 0 < x_i < 1/2 componentwise",
                )?;
            }
            parallel(xs)
        }
        GadgetSpec::BernoulliChain { theta, x } => {
            check(
                theta > &Rational::one(),
                "BernoulliChain requires theta > 1",
            )?;
            check(
                x >= &(-half()) && x <= &half(),
                "BernoulliChain requires -1/2 <= x <= 1/2",
            )?;
            bernoulli_chain(theta, x)
        }
        GadgetSpec::SqrtSum { s, t } => {
            check(!s.is_empty(), "SqrtSum requires at least one s_i")?;
            check(s.iter().all(|&si| si >= 1), "SqrtSum requires s_i >= 1")?;
            check(*t >= 1, "SqrtSum requires t >= 1")?;
            let (instance, tau) = sqrt_sum(s, *t);
            return Ok(Gadget {
                instance,
                threshold: Some(tau),
            });
        }
    };
    Ok(Gadget {
        instance,
        threshold: None,
    })
}

fn example1() -> ProblemInstance {
    let mut lmc = Lmc::new(
        vec!["q1".into(), "q2".into(), "r1".into(), "r2".into()],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let (q1, q2, r1, r2) = (0, 1, 2, 3);
    let (a, b, c) = (0, 1, 2);
    lmc.set_prob(q1, a, q1, Rational::new(1.into(), 2.into()));
    lmc.set_prob(q1, b, q1, Rational::new(1.into(), 4.into()));
    lmc.set_prob(q1, c, r1, Rational::new(1.into(), 4.into()));
    lmc.set_prob(q2, a, q2, Rational::new(1.into(), 4.into()));
    lmc.set_prob(q2, b, q2, Rational::new(1.into(), 2.into()));
    lmc.set_prob(q2, c, r2, Rational::new(1.into(), 4.into()));
    lmc.set_prob(r1, c, r1, Rational::one());
    lmc.set_prob(r2, c, r2, Rational::one());
    ProblemInstance::new(
        lmc,
        SubDistribution::dirac(4, q1),
        SubDistribution::dirac(4, q2),
    )
    .unwrap()
}

fn two_state() -> ProblemInstance {
    let mut lmc = Lmc::new(vec!["q1".into(), "q2".into()], vec!["a".into(), "b".into()]).unwrap();
    let third = Rational::new(1.into(), 3.into());
    let two_thirds = Rational::new(2.into(), 3.into());
    lmc.set_prob(0, 0, 0, third.clone());
    lmc.set_prob(0, 1, 1, two_thirds.clone());
    lmc.set_prob(1, 0, 1, two_thirds);
    lmc.set_prob(1, 1, 0, third);
    ProblemInstance::new(
        lmc,
        SubDistribution::dirac(2, 0),
        SubDistribution::dirac(2, 1),
    )
    .unwrap()
}

fn irrational(x: &Rational) -> ProblemInstance {
    let mut lmc = Lmc::new(
        vec!["q1".into(), "q2".into(), "r".into()],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let (q1, q2, r) = (0, 1, 2);
    let (a, b, c) = (0, 1, 2);
    let rest = half() - x;
    lmc.set_prob(q1, a, q1, half());
    lmc.set_prob(q1, b, q1, rest.clone());
    lmc.set_prob(q1, c, r, x.clone());
    lmc.set_prob(q2, a, q2, rest);
    lmc.set_prob(q2, b, q2, half());
    lmc.set_prob(q2, c, r, x.clone());
    lmc.set_prob(r, c, r, Rational::one());
    ProblemInstance::new(
        lmc,
        SubDistribution::dirac(3, q1),
        SubDistribution::dirac(3, q2),
    )
    .unwrap()
}

fn parallel(xs: &[Rational]) -> ProblemInstance {
    let n = xs.len();
    let mut states = vec!["p1".to_string(), "p2".to_string()];
    states.extend((1..=n).map(|i| format!("q1_{i}")));
    states.extend((1..=n).map(|i| format!("q2_{i}")));
    states.push("r".to_string());
    let mut alphabet: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    alphabet.extend(["a".to_string(), "b".to_string(), "c".to_string()]);

    let mut lmc = Lmc::new(states, alphabet).unwrap();
    let (p1, p2) = (0, 1);
    let q1 = |i: usize| 2 + i;
    let q2 = |i: usize| 2 + n + i;
    let r = 2 + 2 * n;
    let (a, b, c) = (n, n + 1, n + 2);
    let frac = Rational::new(1.into(), BigInt::from(n));
    for (i, x) in xs.iter().enumerate() {
        lmc.set_prob(p1, i, q1(i), frac.clone());
        lmc.set_prob(p2, i, q2(i), frac.clone());
        let rest = half() - x;
        lmc.set_prob(q1(i), a, q1(i), half());
        lmc.set_prob(q1(i), b, q1(i), rest.clone());
        lmc.set_prob(q1(i), c, r, x.clone());
        lmc.set_prob(q2(i), a, q2(i), rest);
        lmc.set_prob(q2(i), b, q2(i), half());
        lmc.set_prob(q2(i), c, r, x.clone());
    }
    lmc.set_prob(r, c, r, Rational::one());
    let total = 3 + 2 * n;
    ProblemInstance::new(
        lmc,
        SubDistribution::dirac(total, p1),
        SubDistribution::dirac(total, p2),
    )
    .unwrap()
}

fn bernoulli_chain(theta: &Rational, x: &Rational) -> ProblemInstance {
    let mut lmc = Lmc::new(
        vec![
            "p1".into(),
            "p2".into(),
            "q1".into(),
            "q2".into(),
            "r1".into(),
            "r2".into(),
        ],
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    let (p1, p2, q1, q2, r1, r2) = (0, 1, 2, 3, 4, 5);
    let (a, b) = (0, 1);
    let inv2t = (theta * Rational::new(2.into(), 1.into())).recip();
    let cross = half() - &inv2t;
    lmc.set_prob(p1, a, q1, half() - x);
    lmc.set_prob(p1, b, r1, half() + x);
    lmc.set_prob(p2, a, q2, half() + x);
    lmc.set_prob(p2, b, r2, half() - x);
    lmc.set_prob(q1, a, q1, half());
    lmc.set_prob(q1, a, q2, cross.clone());
    lmc.set_prob(q1, b, q1, inv2t.clone());
    lmc.set_prob(q2, a, q2, inv2t);
    lmc.set_prob(q2, b, q2, half());
    lmc.set_prob(q2, b, q1, cross);
    lmc.set_prob(r1, a, r1, Rational::one());
    lmc.set_prob(r2, b, r2, Rational::one());
    ProblemInstance::new(
        lmc,
        SubDistribution::dirac(6, p1),
        SubDistribution::dirac(6, p2),
    )
    .unwrap()
}

fn sqrt_sum(s: &[u64], t: u64) -> (ProblemInstance, Rational) {
    let n = s.len() as u64;
    let h = BigInt::from(3) * BigInt::from(s.iter().copied().max().unwrap());
    let xs: Vec<Rational> = s
        .iter()
        .map(|&si| Rational::new(BigInt::from(2) * BigInt::from(si), &h * &h))
        .collect();
    let tau = Rational::new(BigInt::from(t), BigInt::from(n) * &h);
    (parallel(&xs), tau)
}

/// A value `sum_i c_i sqrt(r_i)` with rational coefficients and square-free
/// natural radicands (radicand 1 is the rational part). Terms are merged and
/// sorted, so equal values have equal representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicDistance {
    terms: Vec<(Rational, u64)>,
}

/// Splits `r` into `(s, f)` with `r = s^2 * f` and `f` square-free.
/// Trial division; complete for every radicand below 10^12 and for larger
/// ones whose leftover cofactor is a perfect square.
fn extract_square(r: u64) -> (u64, u64) {
    let mut square_root = 1u64;
    let mut rest = r;
    let mut d = 2u64;
    while d <= 1_000_000 && d * d <= rest {
        while rest.is_multiple_of(d * d) {
            rest /= d * d;
            square_root *= d;
        }
        d += 1;
    }
    let isq = rest.isqrt();
    if isq * isq == rest {
        square_root *= isq;
        rest = 1;
    }
    (square_root, rest)
}

impl SymbolicDistance {
    /// Canonicalizes raw terms: square parts are pulled into coefficients,
    /// like radicands merged, zero terms dropped.
    pub fn new(raw: Vec<(Rational, u64)>) -> Self {
        let mut merged: std::collections::BTreeMap<u64, Rational> =
            std::collections::BTreeMap::new();
        for (coeff, radicand) in raw {
            if coeff.is_zero() || radicand == 0 {
                continue;
            }
            let (sq, rest) = extract_square(radicand);
            let entry = merged.entry(rest).or_insert_with(Rational::zero);
            *entry += coeff * Rational::from_integer(BigInt::from(sq));
        }
        merged.retain(|_, c| !c.is_zero());
        SymbolicDistance {
            terms: merged.into_iter().map(|(r, c)| (c, r)).collect(),
        }
    }

    pub fn from_rational(q: Rational) -> Self {
        SymbolicDistance::new(vec![(q, 1)])
    }

    /// The terms `(coefficient, radicand)` in canonical order.
    pub fn terms(&self) -> &[(Rational, u64)] {
        &self.terms
    }

    /// Exact rational value, if the whole expression is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(c, 1)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, r)| rational_to_f64(c) * (*r as f64).sqrt())
            .sum()
    }

    /// Exact comparison against a rational.
    ///
    /// Rational expressions compare directly. Otherwise the value is
    /// irrational (square roots of distinct square-free integers are linearly
    /// independent over the rationals), so interval refinement with exact
    /// rational bounds on each sqrt terminates with a strict ordering.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        if let Some(v) = self.as_rational() {
            return v.cmp(q);
        }
        for bits in [64u32, 128, 256, 512, 1024] {
            let mut lo = -q.clone();
            let mut hi = -q.clone();
            for (c, r) in &self.terms {
                if *r == 1 {
                    lo += c;
                    hi += c;
                    continue;
                }
                let (slo, shi) = sqrt_interval(*r, bits);
                if c.is_positive() {
                    lo += c * &slo;
                    hi += c * &shi;
                } else {
                    lo += c * &shi;
                    hi += c * &slo;
                }
            }
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
        }
        panic!("comparison undecided at 1024 bits; radicand too large to canonicalize")
    }

    /// True iff the value lies in `[lower, upper]`.
    pub fn in_interval(&self, lower: &Rational, upper: &Rational) -> bool {
        self.cmp_rational(lower) != Ordering::Less && self.cmp_rational(upper) != Ordering::Greater
    }
}

/// `[a/2^k, (a+1)/2^k]` enclosing `sqrt(r)`, via the integer square root of
/// `r * 4^k`.
fn sqrt_interval(r: u64, bits: u32) -> (Rational, Rational) {
    let scaled = BigInt::from(r) << (2 * bits);
    let root = scaled.sqrt();
    let denom = BigInt::one() << bits;
    (
        Rational::new(root.clone(), denom.clone()),
        Rational::new(root + 1, denom),
    )
}

impl std::fmt::Display for SymbolicDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *r == 1 {
                f.write_str(&format_rational(c))?;
            } else if c.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{}*sqrt({})", format_rational(c), r)?;
            }
        }
        Ok(())
    }
}

/// The closed-form distance of a family, where one exists.
///
/// `TwoState -> 1`, `Irrational(x) -> (1/2) sqrt(2x)`,
/// `Example1 -> sqrt(2)/4`, `Parallel(xs) -> (1/n) sum (1/2) sqrt(2 x_i)`,
/// `SqrtSum -> (1/(n h)) sum sqrt(s_i)`. `BernoulliChain` has no closed form.
pub fn closed_form(spec: &GadgetSpec) -> Result<SymbolicDistance, GadgetError> {
    match spec {
        GadgetSpec::TwoState => Ok(SymbolicDistance::from_rational(Rational::one())),
        GadgetSpec::Example1 => half_sqrt_2x(&Rational::new(1.into(), 4.into())),
        GadgetSpec::Irrational(x) => half_sqrt_2x(x),
        GadgetSpec::Parallel(xs) => {
            let n = BigInt::from(xs.len());
            let scale = Rational::new(BigInt::one(), n);
            let mut terms = Vec::new();
            for x in xs {
                for (c, r) in half_sqrt_2x(x)?.terms {
                    terms.push((c * &scale, r));
                }
            }
            Ok(SymbolicDistance::new(terms))
        }
        GadgetSpec::SqrtSum { s, t: _ } => {
            let n = BigInt::from(s.len() as u64);
            let h = BigInt::from(3) * BigInt::from(s.iter().copied().max().unwrap());
            let scale = Rational::new(BigInt::one(), n * h);
            Ok(SymbolicDistance::new(
                s.iter().map(|&si| (scale.clone(), si)).collect(),
            ))
        }
        GadgetSpec::BernoulliChain { .. } => Err(GadgetError::NoClosedForm),
    }
}

/// `(1/2) sqrt(2x)` for rational `x = p/q`, as `(1/(2q)) sqrt(2 p q)`.
fn half_sqrt_2x(x: &Rational) -> Result<SymbolicDistance, GadgetError> {
    let p = x.numer().clone();
    let q = x.denom().clone();
    let radicand = (BigInt::from(2) * &p * &q).to_u64().ok_or_else(|| {
        GadgetError::ParameterOutOfRange("2 * numer(x) * denom(x) must fit in u64".into())
    })?;
    let coeff = Rational::new(BigInt::one(), BigInt::from(2) * q);
    Ok(SymbolicDistance::new(vec![(coeff, radicand)]))
}
