// Block products are not hit with probability near one while r is small.

use sunflower::constructions::{lemma3_r_bound, tightness_chain, BlockPartition};
use sunflower::engine::{mc_block_hit_probability, DEFAULT_SEED};

pub fn run_example() -> sunflower::Result<bool> {
    let (delta, eps) = (0.25, 0.25);
    let mut all = true;
    for k in [2usize, 4, 8, 16] {
        let r_max = lemma3_r_bound(k, delta, eps).floor() as usize;
        if r_max == 0 {
            println!("k={k}: no r in range");
            continue;
        }
        let chain = tightness_chain(k, r_max, delta, eps)?;
        println!("k={k} r={r_max}: terms {:.4?} holds={}", chain.terms, chain.holds());
        all &= chain.holds();
    }

    // beyond the materialization cap, estimate directly on the partition
    let part = BlockPartition::new(16, 64)?;
    let est = mc_block_hit_probability(&part, delta, 20_000, DEFAULT_SEED)?;
    println!("k=16 r=64: Pr(hit) ≈ {:.4} ± {:.4}", est.p_hat, est.half_width_3sigma);
    Ok(all)
}

#[allow(dead_code)]
fn main() -> sunflower::Result<()> {
    run_example().map(|_| ())
}
