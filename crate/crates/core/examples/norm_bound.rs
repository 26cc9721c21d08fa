//! Picks the largest grid kappa with M(kappa) <= 1, the cutoff after which
//! the step factor drops below 1/2, and checks the weighted one-step ratio
//! over every legal state up to a fixed length. Also runs the same sweep in
//! exact rational arithmetic.

use permfront::analysis::{self, verify_norm_bound_exact, WeightParams};
use permfront::Pattern;

fn main() -> permfront::Result<()> {
    let kappa = analysis::choose_kappa(1.0)?;
    let cutoff = analysis::choose_cutoff(kappa, 0.5)?;
    println!("kappa = {kappa}  M(kappa) = {}  cutoff = {cutoff}", analysis::big_m(kappa)?);

    let params = WeightParams::new(0.5, kappa)?;
    for v in ["132", "1342", "1324"] {
        let v: Pattern = v.parse()?;
        let report = analysis::verify_norm_bound(&v, params, 7, 10_000_000)?;
        println!(
            "{v}: {} states, max ratio {:.12}, tail max {:?}, within bound: {}",
            report.states_checked, report.max_ratio_observed, report.max_tail_ratio, report.within_bound
        );
        for l in &report.per_length {
            println!("    s={} states={} max={:.6} bound={:.6}", l.s, l.states, l.max_ratio, l.bound);
        }
    }

    // Dyadic parameters, so the rationals below are the exact binary values.
    let exact = verify_norm_bound_exact(&"132".parse()?, WeightParams::new(0.5, 0.75)?, 6, 1_000_000)?;
    println!(
        "\nexact, kappa = 3/4: M = {}, max ratio = {}, within bound: {}",
        exact.m_kappa,
        exact.max_ratio_observed,
        exact.within_bound()
    );
    Ok(())
}
