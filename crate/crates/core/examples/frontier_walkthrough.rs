//! Follows one pattern-avoiding history and prints the frontier after each
//! insertion: the partial occurrences that are still alive and the block of
//! ranks each of them rules out.

use permfront::{Pattern, State};

fn main() -> permfront::Result<()> {
    let v: Pattern = "1324".parse()?;
    let history = [1, 2, 1, 4, 3, 2];

    let mut x = State::root();
    for r in history {
        x = x.step(&v, r)?;
        println!("perm {}  (legal next ranks {:?})", x.perm(), x.legal_ranks());
        for e in x.frontier() {
            println!(
                "    positions {:?} forbid [{}, {}]",
                e.occurrence.positions(),
                e.interval.lo,
                e.interval.hi
            );
        }
    }

    // Illegal insertions are rejected rather than silently producing a
    // permutation that contains the pattern.
    if let Some(bad) = (1..=x.s() + 1).find(|&r| !x.is_legal(r)) {
        println!("\nrank {bad} is refused: {}", x.step(&v, bad).unwrap_err());
    }
    println!("\nas JSON: {}", x.to_json());
    Ok(())
}
