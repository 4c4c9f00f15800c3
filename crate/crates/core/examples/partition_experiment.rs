// Random partitions into t classes: how many classes contain a member.

use sunflower::constructions::block_product_family;
use sunflower::engine::{lemma2_identity_check, partition_experiment, DEFAULT_SEED};

pub fn run_example() -> sunflower::Result<bool> {
    let (f, _) = block_product_family(3, 4)?;
    let stats = partition_experiment(&f, 4, 20_000, DEFAULT_SEED)?;
    println!("mean hit classes {:.4} (se {:.4})", stats.mean_hit_classes, stats.std_error);
    for (j, frac) in &stats.frac_trials_with_at_least {
        println!("  at least {j} hit classes: {frac:.4}");
    }

    let rep = lemma2_identity_check(&f, 4, 20_000, DEFAULT_SEED)?;
    println!(
        "measured {:.4} vs t·q = {:.4} (3σ {:.4}): {}",
        rep.measured_mean,
        rep.expected_hit_classes,
        rep.three_sigma,
        if rep.pass { "PASS" } else { "FAIL" }
    );
    Ok(rep.pass)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
