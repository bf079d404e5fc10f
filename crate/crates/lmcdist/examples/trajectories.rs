//! Follow the likelihood ratio L_i = |pi2^w| / |pi1^w| along chosen words
//! and dump a trajectory as CSV.
//!
//! ```bash
//! cargo run --example trajectories
//! ```

use lmcdist::gadgets::{generate, GadgetSpec};
use lmcdist::simulate::{likelihood_trajectory, write_trajectory_csv};

fn main() {
    let inst = generate(&GadgetSpec::Example1).unwrap().instance;
    let lmc = inst.lmc();
    let letters = |word: &str| -> Vec<usize> {
        word.chars()
            .map(|ch| lmc.letter_index(&ch.to_string()).unwrap())
            .collect()
    };

    for word in ["", "ac", "aabc", "bbbc"] {
        let traj = likelihood_trajectory(&inst, &letters(word)).unwrap();
        println!(
            "word {:5} ratios {:?}{}",
            format!("{word:?}"),
            traj.ratios,
            if traj.truncated { " (truncated)" } else { "" }
        );
    }

    // Ratios freeze once both chains are absorbed in the c-sinks.
    let traj = likelihood_trajectory(&inst, &letters("abacccc")).unwrap();
    let path = std::env::temp_dir().join("trajectory_abacccc.csv");
    write_trajectory_csv(&traj, &inst, std::fs::File::create(&path).unwrap()).unwrap();
    println!("wrote step,letter,ratio rows to {}", path.display());
}
