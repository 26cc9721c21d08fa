//! Counts avoiders of every pattern of length 3 by depth-first search over
//! legal histories. All six give the Catalan numbers.

use permfront::engine::{count_avoiders_with, CountConfig};
use permfront::perm::{Pattern, Permutation};

fn main() -> permfront::Result<()> {
    let config = CountConfig {
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..CountConfig::default()
    };
    for p in Permutation::all(3) {
        let v = Pattern::new(p)?;
        let table = count_avoiders_with(&v, 12, &config)?;
        let counts: Vec<String> = table.counts().iter().map(|c| c.to_string()).collect();
        println!("Av({v}): {}", counts.join(", "));
    }

    let v: Pattern = "1342".parse()?;
    println!("\n{}", count_avoiders_with(&v, 10, &config)?.to_csv());
    Ok(())
}
