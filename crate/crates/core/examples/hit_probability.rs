// Probability that a random δ-subset contains a member, three ways.

use sunflower::constructions::block_product_family;
use sunflower::engine::{
    exact_hit_probability_by, mc_hit_probability, with_clopper_pearson, Method, DEFAULT_SEED,
};

pub fn run_example() -> sunflower::Result<f64> {
    let (f, _) = block_product_family(2, 2)?;
    let delta = 0.5;
    let enumerated = exact_hit_probability_by(&f, delta, Method::ExactEnumeration)?;
    let ie = exact_hit_probability_by(&f, delta, Method::InclusionExclusion)?;
    let mc = with_clopper_pearson(mc_hit_probability(&f, delta, 100_000, DEFAULT_SEED)?);

    println!("enumeration         {:.12}", enumerated.p_hat);
    println!("inclusion-exclusion {:.12}", ie.p_hat);
    println!(
        "monte carlo         {:.6} ± {:.6} (cp {:?})",
        mc.p_hat, mc.half_width_3sigma, mc.clopper_pearson
    );
    Ok(enumerated.p_hat)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
