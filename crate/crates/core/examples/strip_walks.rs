//! The generic growth-system layer on a second instance: lattice walks in a
//! strip of fixed width. Checks the structural axioms, counts histories, and
//! compares with pattern avoidance through the same interface.

use permfront::analysis::{self, WeightParams};
use permfront::rv::{self, parse_steps, PatternSystem, StripWalk};

fn main() -> permfront::Result<()> {
    for width in 1..=4 {
        let sys = StripWalk::new(width, parse_steps("up,down,stay")?)?;
        let report = rv::check_axioms(&sys, 6, 1_000_000)?;
        let counts = rv::count_histories_merged(&sys, 20, 1_000)?;
        let shown: Vec<String> = counts.iter().take(11).map(|c| c.to_string()).collect();
        println!(
            "width {width}: axioms {} (branching {:?}), counts {} ... a_20 = {}",
            if report.passed() { "hold" } else { "FAIL" },
            report.branching,
            shown.join(","),
            counts[20]
        );
    }

    let sys = StripWalk::new(3, parse_steps("up,down")?)?;
    let kappa = analysis::Branching::new(2, 0).choose_kappa(1.0)?;
    let bound = rv::generic_bound_report(&sys, WeightParams::new(0.5, kappa)?, 10, 1_000_000)?;
    println!("\nup/down walks, width 3, kappa = {kappa}: max ratio {:.6}", bound.max_ratio_observed);

    let pattern = PatternSystem::new("132".parse()?);
    println!("132 through the same interface: {:?}", rv::count_histories(&pattern, 8, 1_000_000)?);
    Ok(())
}
