//! Decide whether two state distributions are almost surely distinguishable
//! (total variation distance exactly 1).
//!
//! ```bash
//! cargo run --example distance_one
//! ```

use lmcdist::dist_one::{distance_one, reach_set};
use lmcdist::gadgets::{generate, GadgetSpec};
use lmcdist::rational::rat;

fn main() {
    // Both states of this 2-state chain can emit every finite word, yet in
    // the long run the letter frequencies almost surely betray the start
    // state: the distance is 1.
    let two = generate(&GadgetSpec::TwoState).unwrap().instance;
    let reach = reach_set(&two);
    println!("two-state chain, jointly reachable state pairs:");
    for (r1, r2) in reach.pairs() {
        println!(
            "  ({}, {})",
            two.lmc().state_name(r1),
            two.lmc().state_name(r2)
        );
    }
    println!("distance_one: {}\n", distance_one(&two));

    // The glued example chain couples through its sinks, so the distance
    // stays below 1.
    let glued = generate(&GadgetSpec::Example1).unwrap().instance;
    println!(
        "glued example chain: distance_one = {}",
        distance_one(&glued)
    );

    // The 3-state family never hits distance 1 for any parameter.
    for x in [rat(1, 8), rat(1, 4), rat(3, 8)] {
        let inst = generate(&GadgetSpec::Irrational(x.clone()))
            .unwrap()
            .instance;
        println!(
            "irrational gadget x = {x}: distance_one = {}",
            distance_one(&inst)
        );
    }
}
