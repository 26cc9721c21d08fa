//! Insertion codes: every permutation is built by right insertions, and the
//! sequence of ranks used is a bijective code for it.

use permfront::perm::{decode, encode, insert_right, InsertionCode, Permutation};

fn main() -> permfront::Result<()> {
    let pi: Permutation = "2413".parse()?;
    let code = encode(&pi);
    println!("{pi} has insertion code {code}");

    // Replay the code one rank at a time.
    let mut built = Permutation::empty();
    for &r in code.ranks() {
        built = insert_right(&built, r)?;
        println!("  insert rank {r:>2} -> {built}");
    }
    assert_eq!(built, pi);

    println!("\nall of S_3, in code order:");
    for code in InsertionCode::all(3) {
        println!("  {code} -> {}", decode(&code));
    }
    Ok(())
}
