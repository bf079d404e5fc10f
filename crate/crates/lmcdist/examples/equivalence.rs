//! Decide language equivalence (= total variation distance 0) between
//! state distributions of a labelled Markov chain.
//!
//! ```bash
//! cargo run --example equivalence
//! ```

use lmcdist::gadgets::{generate, GadgetSpec};
use lmcdist::linalg::{equivalence_basis, is_equivalent_bruteforce, DEFAULT_BRUTE_FORCE_CAP};
use lmcdist::model::SubDistribution;

fn main() {
    // Two 2-state chains glued into one 4-state chain: q1/q2 differ only in
    // how often they emit `a` vs `b` before falling into a `c` sink.
    let inst = generate(&GadgetSpec::Example1).unwrap().instance;
    let lmc = inst.lmc();
    let basis = equivalence_basis(lmc);
    println!(
        "chain: {} states, {} letters, equivalence basis of {} vectors",
        lmc.num_states(),
        lmc.num_letters(),
        basis.len()
    );

    let dirac =
        |name: &str| SubDistribution::dirac(lmc.num_states(), lmc.state_index(name).unwrap());
    for (a, b) in [("q1", "q2"), ("r1", "r2"), ("q1", "q1")] {
        let fast = basis.is_equivalent(&dirac(a), &dirac(b)).unwrap();
        // Cross-check against plain word enumeration (exponential, fine here).
        let slow =
            is_equivalent_bruteforce(&dirac(a), &dirac(b), lmc, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(fast, slow);
        println!(
            "delta_{a} and delta_{b}: {}",
            if fast { "equivalent" } else { "not equivalent" }
        );
    }

    // Masses after "ac" witness the inequivalence of q1 and q2.
    let word: Vec<usize> = ["a", "c"]
        .iter()
        .map(|l| lmc.letter_index(l).unwrap())
        .collect();
    println!(
        "mass of 'ac' from q1: {}, from q2: {}",
        lmc.apply_word(&dirac("q1"), &word).unwrap().mass(),
        lmc.apply_word(&dirac("q2"), &word).unwrap().mass()
    );
}
