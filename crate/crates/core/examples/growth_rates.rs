//! Root and ratio estimates of the growth rate from exact counts.

use permfront::analysis::{growth_csv, growth_estimates};
use permfront::engine;
use permfront::Pattern;

fn main() -> permfront::Result<()> {
    for (v, n_max) in [("132", 13), ("1342", 10), ("1234", 9)] {
        let v: Pattern = v.parse()?;
        let table = engine::count_avoiders(&v, n_max)?;
        println!("# {v}");
        print!("{}", growth_csv(&growth_estimates(&table)?));
    }
    Ok(())
}
