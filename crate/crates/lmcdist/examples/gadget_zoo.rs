//! Generate every built-in chain family and print its closed-form distance
//! where one exists.
//!
//! ```bash
//! cargo run --example gadget_zoo
//! ```

use lmcdist::gadgets::{closed_form, generate, GadgetSpec};
use lmcdist::rational::{format_rational, int, rat};

fn main() {
    let specs = vec![
        ("example1", GadgetSpec::Example1),
        ("two-state", GadgetSpec::TwoState),
        ("irrational x=1/4", GadgetSpec::Irrational(rat(1, 4))),
        (
            "parallel xs=[1/8, 1/4]",
            GadgetSpec::Parallel(vec![rat(1, 8), rat(1, 4)]),
        ),
        (
            "bernoulli-chain theta=2 x=1/4",
            GadgetSpec::BernoulliChain {
                theta: int(2),
                x: rat(1, 4),
            },
        ),
        (
            "sqrt-sum s=[2, 3] t=3",
            GadgetSpec::SqrtSum {
                s: vec![2, 3],
                t: 3,
            },
        ),
    ];
    for (label, spec) in specs {
        let gadget = generate(&spec).unwrap();
        let lmc = gadget.instance.lmc();
        assert!(lmc.validate().is_ok());
        print!(
            "{label}: {} states over {{{}}}",
            lmc.num_states(),
            lmc.alphabet().join(", ")
        );
        match closed_form(&spec) {
            Ok(value) => print!(", d = {} ~ {:.8}", value, value.to_f64()),
            Err(_) => print!(", d has no closed form (see the bernoulli example)"),
        }
        if let Some(tau) = &gadget.threshold {
            // The square-root-sum reduction: d >= tau iff sum sqrt(s_i) >= t.
            print!(", threshold tau = {}", format_rational(tau));
        }
        println!();
    }
}
