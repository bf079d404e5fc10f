//! Monte-Carlo estimation of the distance via likelihood ratios.
//!
//! Along a run prefix `w`, the likelihood ratio is `L = |pi2^w| / |pi1^w|`.
//! Under `pi1` the sequence `L_0, L_1, ...` is a nonnegative martingale with
//! expectation 1 and converges almost surely; the event `{lim L <= 1}`
//! attains the distance: `d(pi1, pi2) = pi1(E) - pi2(E)`. The estimator
//! samples runs of a fixed length under both initial distributions and uses
//! the finite-horizon surrogate `{L_n <= 1}`, which is consistent as the run
//! length grows (no rate is known, so the acceptance thresholds are loose).
//!
//! Sampling proceeds state-wise (a state from `pi`, then transitions), while
//! `L` is computed from the emitted word alone; the state sequence stays
//! internal. Runs whose denominator `|pi1^w|` hits zero (possible only under
//! `pi2`-sampling) count as `L = infinity`.
//!
//! # Random numbers
//!
//! Results must reproduce bit-for-bit across platforms and thread counts, so
//! the generator is a fixed counter-based construction rather than a library
//! RNG: output `k` of a generator with key `K` is `mix64(K + (k+1) * GAMMA)`,
//! where `GAMMA = 0x9e3779b97f4a7c15` and `mix64` is the SplitMix64
//! finalizer (xor-shift 30, multiply 0xbf58476d1ce4e5b9, xor-shift 27,
//! multiply 0x94d049bb133111eb, xor-shift 31). Sub-generators derive fresh
//! keys with [`derive_key`]; each sample uses its own key derived from
//! `(seed, stream, sample index)`, so parallel and serial execution agree.

use crate::model::{ModelError, ProblemInstance, SubDistribution};
use crate::rational::rational_to_f64;
use num_traits::Zero;
use rayon::prelude::*;
use std::io::{self, Write};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A fresh generator key for sub-stream `index` of the generator `key`.
pub fn derive_key(key: u64, index: u64) -> u64 {
    mix64(key ^ mix64(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Splittable counter-based generator; see the module docs for the exact
/// construction.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        CounterRng { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// The likelihood-ratio trajectory of one word: `ratios[i] = L_i`, starting
/// at `L_0 = 1`. If some prefix has `|pi1^w| = 0` the trajectory truncates
/// there with `truncated` set (the `L = infinity` convention).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub word: Vec<usize>,
    pub ratios: Vec<f64>,
    pub truncated: bool,
}

/// Exact-rational prefix masses along `word`, rendered to floats.
pub fn likelihood_trajectory(
    inst: &ProblemInstance,
    word: &[usize],
) -> Result<Trajectory, ModelError> {
    let lmc = inst.lmc();
    let mut mu1 = inst.pi1().clone();
    let mut mu2 = inst.pi2().clone();
    let mut ratios = vec![1.0];
    let mut truncated = false;
    for &letter in word {
        mu1 = lmc.step(&mu1, letter)?;
        mu2 = lmc.step(&mu2, letter)?;
        let m1 = mu1.mass();
        if m1.is_zero() {
            truncated = true;
            break;
        }
        ratios.push(rational_to_f64(&(mu2.mass() / m1)));
    }
    Ok(Trajectory {
        word: word.to_vec(),
        ratios,
        truncated,
    })
}

/// Writes `step,letter,ratio` rows of a trajectory for external plotting.
pub fn write_trajectory_csv<W: Write>(
    traj: &Trajectory,
    inst: &ProblemInstance,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "step,letter,ratio")?;
    writeln!(out, "0,,{}", traj.ratios[0])?;
    for (i, ratio) in traj.ratios.iter().enumerate().skip(1) {
        let letter = inst.lmc().letter_name(traj.word[i - 1]);
        writeln!(out, "{i},{letter},{ratio}")?;
    }
    Ok(())
}

/// Float rendering of the chain used by the sampler: per-state cumulative
/// transition lists and per-letter matrices.
struct FloatChain {
    n: usize,
    mats: Vec<Vec<Vec<f64>>>,
    /// `(cumulative probability, letter, target)` in declaration order.
    rows: Vec<Vec<(f64, usize, usize)>>,
}

impl FloatChain {
    fn new(inst: &ProblemInstance) -> Self {
        let lmc = inst.lmc();
        let n = lmc.num_states();
        let mats: Vec<Vec<Vec<f64>>> = (0..lmc.num_letters())
            .map(|a| {
                (0..n)
                    .map(|q| (0..n).map(|r| rational_to_f64(lmc.prob(a, q, r))).collect())
                    .collect()
            })
            .collect();
        let rows = (0..n)
            .map(|q| {
                let mut acc = 0.0;
                let mut row = Vec::new();
                for (a, mat) in mats.iter().enumerate() {
                    for (r, &p) in mat[q].iter().enumerate() {
                        if p > 0.0 {
                            acc += p;
                            row.push((acc, a, r));
                        }
                    }
                }
                row
            })
            .collect();
        FloatChain { n, mats, rows }
    }
}

/// Cumulative weights over the support only, so the final fallback always
/// lands on a state of positive probability.
fn cumulative(pi: &SubDistribution) -> Vec<(f64, usize)> {
    let mut acc = 0.0;
    pi.support()
        .into_iter()
        .map(|q| {
            acc += rational_to_f64(pi.weight(q));
            (acc, q)
        })
        .collect()
}

fn pick(cum: &[(f64, usize)], u: f64) -> usize {
    cum.iter()
        .find(|&&(c, _)| u < c)
        .unwrap_or(cum.last().expect("support is nonempty"))
        .1
}

/// `rho * M(a)` in floats, returning the image and its mass.
fn step_f(chain: &FloatChain, rho: &[f64], letter: usize) -> (Vec<f64>, f64) {
    let mat = &chain.mats[letter];
    let mut out = vec![0.0; chain.n];
    for (q, &w) in rho.iter().enumerate() {
        if w > 0.0 {
            for (r, slot) in out.iter_mut().enumerate() {
                *slot += w * mat[q][r];
            }
        }
    }
    let mass = out.iter().sum();
    (out, mass)
}

/// Final likelihood ratio of one sampled run of `run_length` steps under the
/// initial distribution with cumulative weights `init_cum`.
fn sample_final_ratio(
    chain: &FloatChain,
    init_cum: &[(f64, usize)],
    rho1_init: &[f64],
    rho2_init: &[f64],
    run_length: usize,
    key: u64,
) -> f64 {
    let mut rng = CounterRng::new(key);
    let mut state = pick(init_cum, rng.next_unit());
    let mut rho1 = rho1_init.to_vec();
    let mut rho2 = rho2_init.to_vec();
    let mut ratio = 1.0f64;
    for _ in 0..run_length {
        let u = rng.next_unit();
        let row = &chain.rows[state];
        let idx = row
            .iter()
            .position(|&(c, _, _)| u < c)
            .unwrap_or(row.len() - 1);
        let (_, letter, target) = row[idx];
        state = target;

        let (w1, s1) = step_f(chain, &rho1, letter);
        if s1 <= 0.0 {
            // The denominator chain cannot emit this word at all.
            return f64::INFINITY;
        }
        let (w2, s2) = step_f(chain, &rho2, letter);
        ratio *= s2 / s1;
        for (slot, w) in rho1.iter_mut().zip(&w1) {
            *slot = w / s1;
        }
        if s2 > 0.0 {
            for (slot, w) in rho2.iter_mut().zip(&w2) {
                *slot = w / s2;
            }
        } else {
            rho2.iter_mut().for_each(|w| *w = 0.0);
        }
    }
    ratio
}

/// Monte-Carlo estimate of the distance with binomial standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// `P1(L_n <= 1) - P2(L_n <= 1)`, an estimate of the distance.
    pub estimate: f64,
    /// `sqrt(p1 (1-p1)/n + p2 (1-p2)/n)`.
    pub std_error: f64,
    pub prob1: f64,
    pub prob2: f64,
    /// Sample mean of `L_n` over the `pi1`-sampled runs (martingale check:
    /// its expectation is exactly 1).
    pub mean_ratio_pi1: f64,
    /// Standard error of that mean.
    pub se_ratio_pi1: f64,
    pub samples: usize,
    pub run_length: usize,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    below: u64,
    sum: f64,
    sum_sq: f64,
}

const CHUNK: usize = 4096;

fn run_stream(
    chain: &FloatChain,
    init_cum: &[(f64, usize)],
    rho1: &[f64],
    rho2: &[f64],
    run_length: usize,
    samples: usize,
    stream_key: u64,
) -> Tally {
    let chunks = samples.div_ceil(CHUNK);
    // Per-chunk tallies are combined in chunk order, so the result does not
    // depend on how rayon schedules the chunks.
    let partials: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(samples);
            let mut t = Tally::default();
            for i in lo..hi {
                let key = derive_key(stream_key, i as u64);
                let l = sample_final_ratio(chain, init_cum, rho1, rho2, run_length, key);
                if l <= 1.0 {
                    t.below += 1;
                }
                if l.is_finite() {
                    t.sum += l;
                    t.sum_sq += l * l;
                } else {
                    t.sum = f64::INFINITY;
                    t.sum_sq = f64::INFINITY;
                }
            }
            t
        })
        .collect();
    let mut total = Tally::default();
    for t in partials {
        total.below += t.below;
        total.sum += t.sum;
        total.sum_sq += t.sum_sq;
    }
    total
}

/// Samples `samples` runs of length `run_length` under each initial
/// distribution (independent streams derived from `seed`) and estimates the
/// distance by the surrogate event `{L_n <= 1}`.
///
/// Identical seeds give bit-identical results, for any thread count.
pub fn estimate_distance_mc(
    inst: &ProblemInstance,
    run_length: usize,
    samples: usize,
    seed: u64,
) -> McEstimate {
    assert!(run_length >= 1, "run_length must be >= 1");
    assert!(samples >= 1, "samples must be >= 1");
    let chain = FloatChain::new(inst);
    let cum1 = cumulative(inst.pi1());
    let cum2 = cumulative(inst.pi2());
    let rho1: Vec<f64> = inst.pi1().weights().iter().map(rational_to_f64).collect();
    let rho2: Vec<f64> = inst.pi2().weights().iter().map(rational_to_f64).collect();

    let t1 = run_stream(
        &chain,
        &cum1,
        &rho1,
        &rho2,
        run_length,
        samples,
        derive_key(seed, 1),
    );
    let t2 = run_stream(
        &chain,
        &cum2,
        &rho1,
        &rho2,
        run_length,
        samples,
        derive_key(seed, 2),
    );

    let n = samples as f64;
    let p1 = t1.below as f64 / n;
    let p2 = t2.below as f64 / n;
    let std_error = (p1 * (1.0 - p1) / n + p2 * (1.0 - p2) / n).sqrt();
    // pi1-sampled prefixes always have positive pi1-mass, so every ratio in
    // stream 1 is finite.
    let mean = t1.sum / n;
    let variance = if samples > 1 {
        ((t1.sum_sq - t1.sum * t1.sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        estimate: p1 - p2,
        std_error,
        prob1: p1,
        prob2: p2,
        mean_ratio_pi1: mean,
        se_ratio_pi1: (variance / n).sqrt(),
        samples,
        run_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{self, GadgetSpec};
    use crate::model::SubDistribution;

    #[test]
    fn empty_word_trajectory_is_just_one() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let traj = likelihood_trajectory(&inst, &[]).unwrap();
        assert_eq!(traj.ratios, vec![1.0]);
        assert!(!traj.truncated);
    }

    #[test]
    fn example1_ratio_after_ac() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let word = vec![
            lmc.letter_index("a").unwrap(),
            lmc.letter_index("c").unwrap(),
        ];
        let traj = likelihood_trajectory(&inst, &word).unwrap();
        // masses 1/8 and 1/16 after "ac"
        assert_eq!(traj.ratios, vec![1.0, 0.5, 0.5]);
        assert!(!traj.truncated);
    }

    #[test]
    fn trajectory_truncates_when_pi1_mass_dies() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let n = lmc.num_states();
        // pi1 on the c-sink, pi2 on a q-state: letter "a" kills pi1's mass
        // while pi2 keeps emitting it.
        let swapped = inst
            .with_initials(
                SubDistribution::dirac(n, lmc.state_index("r1").unwrap()),
                SubDistribution::dirac(n, lmc.state_index("q2").unwrap()),
            )
            .unwrap();
        let a = lmc.letter_index("a").unwrap();
        let traj = likelihood_trajectory(&swapped, &[a]).unwrap();
        assert!(traj.truncated);
        assert_eq!(traj.ratios, vec![1.0]);
    }

    #[test]
    fn trajectory_rejects_unknown_letters() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        assert!(likelihood_trajectory(&inst, &[7]).is_err());
    }

    #[test]
    fn counter_rng_is_stable_and_uniform_ish() {
        let mut rng = CounterRng::new(42);
        let a = rng.next_u64();
        let b = rng.next_u64();
        assert_ne!(a, b);
        let mut rng2 = CounterRng::new(42);
        assert_eq!(rng2.next_u64(), a);
        assert_ne!(CounterRng::new(derive_key(42, 0)).next_u64(), a);

        let mut rng = CounterRng::new(7);
        let mean: f64 = (0..10_000).map(|_| rng.next_unit()).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn estimates_are_deterministic() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        let a = estimate_distance_mc(&inst, 50, 2000, 1234);
        let b = estimate_distance_mc(&inst, 50, 2000, 1234);
        assert_eq!(a, b);
        let c = estimate_distance_mc(&inst, 50, 2000, 1235);
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn equivalent_pair_estimates_exactly_zero() {
        // Equivalent initials give identical prefix masses, so L is always 1
        // and both surrogate probabilities are 1.
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let n = lmc.num_states();
        let equiv = inst
            .with_initials(
                SubDistribution::dirac(n, lmc.state_index("r1").unwrap()),
                SubDistribution::dirac(n, lmc.state_index("r2").unwrap()),
            )
            .unwrap();
        let est = estimate_distance_mc(&equiv, 20, 500, 7);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.prob1, 1.0);
        assert_eq!(est.prob2, 1.0);
    }

    #[test]
    fn estimate_stays_in_range() {
        let inst = gadgets::generate(&GadgetSpec::TwoState).unwrap().instance;
        let est = estimate_distance_mc(&inst, 30, 1000, 99);
        assert!((-1.0..=1.0).contains(&est.estimate));
        assert!(est.std_error >= 0.0);
        let expected = (est.prob1 * (1.0 - est.prob1) / 1000.0
            + est.prob2 * (1.0 - est.prob2) / 1000.0)
            .sqrt();
        assert_eq!(est.std_error, expected);
    }

    #[test]
    fn trajectory_csv_shape() {
        let inst = gadgets::generate(&GadgetSpec::Example1).unwrap().instance;
        let lmc = inst.lmc();
        let word = vec![
            lmc.letter_index("a").unwrap(),
            lmc.letter_index("c").unwrap(),
        ];
        let traj = likelihood_trajectory(&inst, &word).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &inst, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,letter,ratio");
        assert_eq!(lines[1], "0,,1");
        assert_eq!(lines[2], "1,a,0.5");
        assert_eq!(lines.len(), 4);
    }
}
