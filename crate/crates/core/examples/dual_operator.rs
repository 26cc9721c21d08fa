//! Pushes the point mass at the empty permutation forward through the dual
//! transfer operator. The total mass at each length equals the number of
//! avoiders, and every permutation in the support carries weight exactly one.

use permfront::engine::{self, Measure};
use permfront::Pattern;

fn main() -> permfront::Result<()> {
    let v: Pattern = "2143".parse()?;
    let dfs = engine::count_avoiders(&v, 8)?;

    let mut mu = Measure::root(v.clone());
    for n in 0..=8 {
        println!(
            "n={n}: support {:>5}, total mass {:>5}, DFS count {:>5}",
            mu.support_size(),
            mu.total_mass(),
            dfs[n]
        );
        assert_eq!(mu.total_mass(), dfs[n]);
        if n < 8 {
            mu = mu.push_forward();
        }
    }

    let heaviest = mu.support().values().max().cloned().unwrap_or_default();
    println!("largest coefficient at length 8: {heaviest}");
    Ok(())
}
