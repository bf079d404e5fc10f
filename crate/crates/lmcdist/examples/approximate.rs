//! Enclose the distance between certified rational bounds and watch the
//! bracket narrow depth by depth.
//!
//! ```bash
//! cargo run --example approximate
//! ```

use lmcdist::bounds::approximate;
use lmcdist::gadgets::{closed_form, generate, GadgetSpec};
use lmcdist::rational::{format_rational, rat, rational_to_f64};

fn main() {
    // Distance sqrt(2)/4: irrational, so no exact answer exists; the bracket
    // is the strongest certificate available.
    let spec = GadgetSpec::Irrational(rat(1, 4));
    let inst = generate(&spec).unwrap().instance;
    let target = closed_form(&spec).unwrap();

    let report = approximate(&inst, &rat(1, 1000), 30).unwrap();
    println!("target d = {} ~ {:.8}", target, target.to_f64());
    println!(
        "status: {:?}, final depth {}",
        report.status, report.bracket.depth
    );
    println!("depth  lower           upper           width");
    for b in &report.history {
        println!(
            "{:>5}  {:<15} {:<15} {:.2e}",
            b.depth,
            format_rational(&b.lower),
            format_rational(&b.upper),
            rational_to_f64(&b.width()),
        );
        assert!(target.in_interval(&b.lower, &b.upper));
    }
    println!("every bracket contained the closed form exactly");
}
