// Recursive sunflower extraction with its trace.

use sunflower::constructions::{block_product_family, erdos_rado_lower_family};
use sunflower::extraction::{extract_sunflower, ExtractionParams};

pub fn run_example() -> sunflower::Result<bool> {
    let (f, _) = block_product_family(3, 5)?;
    let trace = extract_sunflower(&f, &ExtractionParams::new(3))?;
    for step in &trace.path {
        println!("{step:?}");
    }
    let found = trace.result.as_ref().is_some_and(|s| s.verify());
    if let Some(sf) = &trace.result {
        println!("core {} with petals {:?}", sf.core, sf.petals.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    }

    // the Erdős–Rado family has no 3-sunflower, so extraction must fail
    let free = erdos_rado_lower_family(3, 2)?;
    let none = extract_sunflower(&free, &ExtractionParams::new(3))?;
    println!("sunflower-free family: found = {}", none.succeeded());
    Ok(found && !none.succeeded())
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
