//! Total variation distance between labelled Markov chains.
//!
//! A labelled Markov chain emits one letter per step and so induces a
//! probability measure over infinite words. Given one chain and two initial
//! distributions, this crate decides, bounds, and estimates the total
//! variation distance between the two induced measures:
//!
//! * **Distance 0** ([`distance_zero`]) is language equivalence, decided
//!   exactly in polynomial time through the equivalence basis of
//!   [`linalg`].
//! * **Distance 1** ([`distance_one`]) is almost-sure distinguishability,
//!   decided exactly through product-graph reachability plus exact LP
//!   feasibility ([`dist_one`]).
//! * **Everything in between** is approximated by [`approximate`]: certified
//!   rational brackets `[1 - min(k), 1 - con(k)]` that narrow monotonically
//!   around the distance ([`bounds`]). The distance itself can be irrational,
//!   so a bracket is the strongest exact answer available.
//! * **Example families** with known distances, including the square-root-sum
//!   reduction instances, come from [`gadgets`], with closed forms kept
//!   symbolic as sums `c * sqrt(r)`.
//! * **Bernoulli convolutions**: for one 6-state family the distance is
//!   `1/2 + 1/2 f_theta(x)` for a contraction fixed point `f_theta` solved
//!   numerically in [`bernoulli`].
//! * **Monte-Carlo estimation** ([`simulate`]) samples runs and estimates the
//!   distance from the likelihood-ratio martingale, with a reproducible
//!   counter-based generator.
//!
//! Everything except the `bernoulli` solver and the simulator works in exact
//! arbitrary-precision rational arithmetic; equivalence and support questions
//! are exact properties that floats would misclassify. All types are
//! immutable after construction and safe to share across threads.
//!
//! Chains are built in code (see [`gadgets`]) or read from the `.lmc` text
//! format (see [`mod@format`]). The `lmcdist` binary exposes the same operations
//! as subcommands, and the crate's `examples/` directory holds one runnable
//! example per capability.
//!
//! ```
//! use lmcdist::bounds::{approximate, ApproxStatus};
//! use lmcdist::gadgets::{closed_form, generate, GadgetSpec};
//! use lmcdist::rational::rat;
//!
//! // A 3-state chain whose two marked states have distance (1/2) sqrt(2x):
//! // irrational for x = 1/4, so the answer is a certified rational bracket.
//! let spec = GadgetSpec::Irrational(rat(1, 4));
//! let inst = generate(&spec).unwrap().instance;
//! let report = approximate(&inst, &rat(1, 100), 30).unwrap();
//! assert_eq!(report.status, ApproxStatus::Converged);
//! let value = closed_form(&spec).unwrap(); // sqrt(2)/4, kept symbolic
//! assert!(value.in_interval(&report.bracket.lower, &report.bracket.upper));
//! ```

pub mod bernoulli;
pub mod bounds;
pub mod cli;
pub mod dist_one;
pub mod format;
pub mod gadgets;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod rational;
pub mod simulate;

pub use bounds::{approximate, ApproxReport, ApproxStatus, Bracket};
pub use dist_one::{distance_one, reach_set, ReachSet};
pub use format::{parse_lmc, serialize_lmc, ParseError};
pub use gadgets::{closed_form, generate, Gadget, GadgetSpec, SymbolicDistance};
pub use linalg::{distance_zero, equivalence_basis, EquivalenceBasis};
pub use model::{
    disjoint_union, Lmc, ModelError, ProblemInstance, SubDistribution, ValidationError,
    ValidationReport,
};
pub use rational::Rational;
pub use simulate::{estimate_distance_mc, likelihood_trajectory, McEstimate, Trajectory};
