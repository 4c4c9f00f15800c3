// Spreadness certificates and violation witnesses.

use sunflower::constructions::block_product_family;
use sunflower::spread::{spread_witness, spread_witness_with, spreadness, ViolationChoice};
use sunflower::{GroundSet, SetFamily, Subset};

pub fn run_example() -> sunflower::Result<f64> {
    let (bp, _) = block_product_family(2, 4)?;
    let s = spreadness(&bp)?;
    println!("block product k=2 r=4 has spreadness {s}");
    println!("certified at r=4: {}", spread_witness(&bp, 4.0)?.is_certified());

    // a star: element 0 sits in every member
    let star = SetFamily::new(
        GroundSet::new(7)?,
        2,
        (1..7).map(|i| Subset::from_elements([0, i])).collect(),
    )?;
    let rep = spread_witness(&star, 2.0)?;
    if let Some((t, count)) = rep.violation() {
        println!("star is not 2-spread: {t} lies in {count} members");
    }
    let worst = spread_witness_with(&star, 2.0, ViolationChoice::MaxRatio)?;
    println!("worst violation: {:?}", worst.violation());
    Ok(s)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
