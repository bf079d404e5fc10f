//! Shared test helpers: seeded random instances and independent reference
//! implementations (oracles) for the decision procedures and level bounds.

#![allow(dead_code)]

use lmcdist::linalg::EquivalenceBasis;
use lmcdist::lp::{feasible_point, maximize, LinearProgram, LpOutcome};
use lmcdist::model::{Lmc, ProblemInstance, SubDistribution};
use lmcdist::rational::{int, Rational};
use lmcdist::simulate::CounterRng;
use num_bigint::BigInt;

/// A random valid chain with up to `max_states` states and `max_letters`
/// letters: integer cell weights in 0..=3 normalized per row, so all rows sum
/// to exactly 1 and zero transitions are common.
pub fn random_instance(
    rng: &mut CounterRng,
    max_states: usize,
    max_letters: usize,
) -> ProblemInstance {
    let n = 1 + (rng.next_u64() % max_states as u64) as usize;
    let k = 1 + (rng.next_u64() % max_letters as u64) as usize;
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let letters = (0..k).map(|i| format!("l{i}")).collect();
    let mut lmc = Lmc::new(states, letters).unwrap();
    // Half the chains are letter-deterministic (at most one target per
    // letter, like the distance-1 gadget); the rest have sparse random rows.
    // Both shapes are needed for the suite to hit equivalent pairs as well as
    // distance-1 pairs.
    let deterministic = rng.next_u64().is_multiple_of(2);
    for from in 0..n {
        loop {
            let weights: Vec<u64> = if deterministic {
                let mut w = vec![0u64; k * n];
                for letter in 0..k {
                    if rng.next_u64().is_multiple_of(4) && k > 1 {
                        continue;
                    }
                    let target = (rng.next_u64() % n as u64) as usize;
                    w[letter * n + target] = 1 + rng.next_u64() % 3;
                }
                w
            } else {
                (0..k * n)
                    .map(|_| (rng.next_u64() % 8).saturating_sub(4))
                    .collect()
            };
            let total: u64 = weights.iter().sum();
            if total == 0 {
                continue;
            }
            for (idx, w) in weights.iter().enumerate() {
                let prob = Rational::new(BigInt::from(*w), BigInt::from(total));
                lmc.set_prob(from, idx / n, idx % n, prob);
            }
            break;
        }
    }
    let pi1 = random_distribution(rng, n);
    let pi2 = random_distribution(rng, n);
    ProblemInstance::new(lmc, pi1, pi2).unwrap()
}

/// A random distribution with mass exactly 1: Dirac half the time (distance
/// 1 needs initial supports that never meet), small rational weights
/// otherwise.
pub fn random_distribution(rng: &mut CounterRng, n: usize) -> SubDistribution {
    if rng.next_u64().is_multiple_of(2) {
        return SubDistribution::dirac(n, (rng.next_u64() % n as u64) as usize);
    }
    loop {
        let weights: Vec<u64> = (0..n).map(|_| rng.next_u64() % 4).collect();
        let total: u64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let weights = weights
            .iter()
            .map(|w| Rational::new(BigInt::from(*w), BigInt::from(total)))
            .collect();
        return SubDistribution::from_weights(weights).unwrap();
    }
}

fn support_mask(pi: &SubDistribution) -> u32 {
    pi.support().iter().fold(0u32, |m, q| m | (1 << q))
}

/// Support-pair enumeration semi-algorithm for the distance-1 problem,
/// independent of the production decider: enumerate every reachable pair of
/// supports `(supp(pi1^w), supp(pi2^w))` (finitely many) and test each for an
/// equivalent coupling with positive mass.
pub fn distance_one_oracle(inst: &ProblemInstance, basis: &EquivalenceBasis) -> bool {
    let lmc = inst.lmc();
    let n = lmc.num_states();
    assert!(n <= 32, "oracle uses u32 support masks");
    let step_mask = |m: u32, a: usize| -> u32 {
        let mut out = 0;
        for q in 0..n {
            if m & (1 << q) != 0 {
                for r in 0..n {
                    if lmc.prob(a, q, r) > &int(0) {
                        out |= 1 << r;
                    }
                }
            }
        }
        out
    };

    let start = (support_mask(inst.pi1()), support_mask(inst.pi2()));
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    if start.0 != 0 && start.1 != 0 {
        seen.insert(start);
        queue.push_back(start);
    }
    while let Some((m1, m2)) = queue.pop_front() {
        for a in 0..lmc.num_letters() {
            let next = (step_mask(m1, a), step_mask(m2, a));
            // A dead side stays dead, so such pairs can never couple.
            if next.0 != 0 && next.1 != 0 && seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    !seen
        .iter()
        .any(|&(m1, m2)| support_coupling_feasible(n, m1, m2, basis))
}

/// Is there an equivalent pair `mu1, mu2` with `supp(mu1)` inside `m1`,
/// `supp(mu2)` inside `m2`, and `|mu1| = 1` (positive mass, normalized by
/// homogeneity)?
fn support_coupling_feasible(n: usize, m1: u32, m2: u32, basis: &EquivalenceBasis) -> bool {
    let s1: Vec<usize> = (0..n).filter(|q| m1 & (1 << q) != 0).collect();
    let s2: Vec<usize> = (0..n).filter(|q| m2 & (1 << q) != 0).collect();
    let nvars = s1.len() + s2.len();
    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    let mut mass_row = vec![int(0); nvars];
    for slot in mass_row.iter_mut().take(s1.len()) {
        *slot = int(1);
    }
    constraints.push(mass_row);
    rhs.push(int(1));
    for b in basis.vectors() {
        let mut row = Vec::with_capacity(nvars);
        row.extend(s1.iter().map(|&q| b[q].clone()));
        row.extend(s2.iter().map(|&q| b[n + q].clone()));
        constraints.push(row);
        rhs.push(int(0));
    }
    feasible_point(&constraints, &rhs).is_some()
}

/// Largest coupled mass for one word pair, by a direct LP over all states
/// (no support restriction, no aggregation): maximize `|mu1'|` subject to
/// `0 <= mu1' <= mu1`, `0 <= mu2' <= mu2`, and orthogonality to the basis.
pub fn con_word(
    mu1: &SubDistribution,
    mu2: &SubDistribution,
    basis: &EquivalenceBasis,
) -> Rational {
    let n = mu1.len();
    let nvars = 4 * n; // mu1' | mu2' | slack1 | slack2
    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    for q in 0..n {
        let mut row = vec![int(0); nvars];
        row[q] = int(1);
        row[2 * n + q] = int(1);
        constraints.push(row);
        rhs.push(mu1.weight(q).clone());
    }
    for q in 0..n {
        let mut row = vec![int(0); nvars];
        row[n + q] = int(1);
        row[3 * n + q] = int(1);
        constraints.push(row);
        rhs.push(mu2.weight(q).clone());
    }
    for b in basis.vectors() {
        let mut row = vec![int(0); nvars];
        row[..2 * n].clone_from_slice(&b[..2 * n]);
        constraints.push(row);
        rhs.push(int(0));
    }
    let mut objective = vec![int(0); nvars];
    for slot in objective.iter_mut().take(n) {
        *slot = int(1);
    }
    match maximize(&LinearProgram {
        objective,
        constraints,
        rhs,
    }) {
        LpOutcome::Optimal { value, .. } => value,
        other => panic!("coupling LP must be optimal, got {other:?}"),
    }
}

/// `min(k)` and `con(k)` by plain enumeration of all length-`k` words.
pub fn naive_level_bounds(
    inst: &ProblemInstance,
    basis: &EquivalenceBasis,
    depth: usize,
) -> (Rational, Rational) {
    fn go(
        lmc: &Lmc,
        mu1: &SubDistribution,
        mu2: &SubDistribution,
        left: usize,
        basis: &EquivalenceBasis,
        min_k: &mut Rational,
        con_k: &mut Rational,
    ) {
        if left == 0 {
            *min_k += mu1.mass().min(mu2.mass());
            *con_k += con_word(mu1, mu2, basis);
            return;
        }
        for a in 0..lmc.num_letters() {
            let next1 = lmc.step(mu1, a).unwrap();
            let next2 = lmc.step(mu2, a).unwrap();
            go(lmc, &next1, &next2, left - 1, basis, min_k, con_k);
        }
    }
    let mut min_k = int(0);
    let mut con_k = int(0);
    go(
        inst.lmc(),
        inst.pi1(),
        inst.pi2(),
        depth,
        basis,
        &mut min_k,
        &mut con_k,
    );
    (min_k, con_k)
}
