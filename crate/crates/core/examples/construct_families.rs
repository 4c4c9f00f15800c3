// Builds the block-product and Erdős–Rado families and round-trips one through JSON.

use sunflower::constructions::{block_product_family, erdos_rado_lower_family, BlockPartition};
use sunflower::sunflower::is_sunflower_free;
use sunflower::SetFamily;

pub fn run_example() -> sunflower::Result<(usize, usize)> {
    let (bp, part) = block_product_family(3, 4)?;
    println!("block product k=3 r=4: {} sets on {} elements", bp.len(), part.ground_size());

    let er = erdos_rado_lower_family(3, 3)?;
    println!("erdos-rado p=3 k=3: {} sets, 3-sunflower-free = {}", er.len(), is_sunflower_free(&er, 3));

    let json = bp.to_json_string();
    let back = SetFamily::read_json(json.as_bytes())?;
    assert_eq!(back, bp);

    // too large to materialize; stream instead
    let huge = BlockPartition::new(8, 16)?;
    let first: Vec<_> = huge.transversals()?.take(3).collect();
    for s in &first {
        println!("  streamed transversal {s}");
    }
    Ok((bp.len(), er.len()))
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
