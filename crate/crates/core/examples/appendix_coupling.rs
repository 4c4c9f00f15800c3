// Coupling X_δ with a uniform m-subset, and the binomial lower tail.

use sunflower::constructions::block_product_family;
use sunflower::engine::{verify_appendix_decomposition, verify_chernoff_tail};

pub fn run_example() -> sunflower::Result<bool> {
    let (f, _) = block_product_family(3, 4)?;
    let rep = verify_appendix_decomposition(&f, 0.5)?;
    println!(
        "m = {}: {:.6} >= {:.6} * {:.6} = {:.6} -> {}",
        rep.params.m, rep.lhs, rep.uniform_hit, rep.size_tail, rep.rhs, rep.pass
    );

    let ch = verify_chernoff_tail(64, 0.25, 64.0, Some(0.1))?;
    println!("Pr(Bin(64, 1/4) <= 8) = {:.3e} <= e^-2 = {:.3e} -> {}", ch.tail, ch.bound, ch.tail_ok);
    Ok(rep.pass && ch.pass)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
