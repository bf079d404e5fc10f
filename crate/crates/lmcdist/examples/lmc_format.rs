//! Read a chain from the `.lmc` text format, inspect it, and write it back.
//!
//! ```bash
//! cargo run --example lmc_format
//! ```

use lmcdist::format::{parse_lmc, serialize_lmc};
use lmcdist::linalg::distance_zero;

const CHAIN: &str = "\
# A fair and a biased coin that both stop after one flip.
states: fair biased heads tails done
alphabet: h t s
init1: fair=1
init2: biased=1
trans: fair h heads 1/2
trans: fair t tails 1/2
trans: biased h heads 2/3
trans: biased t tails 1/3
trans: heads s done 1
trans: tails s done 1
trans: done s done 1
";

fn main() {
    let inst = parse_lmc(CHAIN).unwrap();
    let lmc = inst.lmc();
    println!(
        "parsed {} states, {} letters; validation ok: {}",
        lmc.num_states(),
        lmc.num_letters(),
        lmc.validate().is_ok()
    );
    println!("equivalent initials: {}", distance_zero(&inst));

    println!("\ncanonical serialization:\n{}", serialize_lmc(&inst));

    // Errors carry positions: here the second row fails to sum to 1.
    let broken = CHAIN.replace("trans: biased h heads 2/3", "trans: biased h heads 1/3");
    match parse_lmc(&broken) {
        Err(e) => println!("broken variant rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
