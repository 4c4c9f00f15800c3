// Exhaustive search for the largest sunflower-free family.

use std::time::Duration;

use sunflower::exact_sun::{sun_value, SunQuery, SunValue};

pub fn run_example() -> sunflower::Result<Vec<SunValue>> {
    let mut out = Vec::new();
    for (p, k) in [(2, 4), (4, 1), (3, 2)] {
        let rep = sun_value(&SunQuery::new(p, k).with_budget(Duration::from_secs(600)))?;
        println!(
            "Sun({p},{k}) = {:?}  ({} nodes on {} elements, {:.2?})",
            rep.value, rep.search.nodes, rep.search.ground_size, rep.search.elapsed
        );
        for s in rep.search.witness.sets() {
            println!("  {s}");
        }
        out.push(rep.value);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
