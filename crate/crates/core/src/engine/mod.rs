//! Random subsets, hit probabilities, and the partition experiment.

mod appendix;
mod exact;
mod monte_carlo;
mod partition;
mod sampling;

pub use appendix::{
    binomial_pmf, decomposition_at, verify_appendix_decomposition, verify_chernoff_tail, AppendixParams,
    AppendixReport, ChernoffReport, EpsCheck, APPENDIX_MAX_GROUND,
};
pub use exact::{
    binomial, exact_hit_probability, exact_hit_probability_by, hit_probability_enumeration,
    hit_probability_inclusion_exclusion, HitEstimate, HitProfile, Method, ENUMERATION_MAX_GROUND,
    INCLUSION_EXCLUSION_MAX_FAMILY,
};
pub use monte_carlo::{
    clopper_pearson, count_hits, estimate_from_counts, mc_block_hit_probability, mc_hit_probability,
    with_clopper_pearson,
};
pub use partition::{lemma2_identity_check, partition_experiment, Lemma2Report, PartitionStats};
pub(crate) use partition::first_member_per_class;
pub(crate) use sampling::partition_from;
pub use sampling::{
    sample_bernoulli_subset, sample_uniform_m_subset, BernoulliSubsetParams, KeyedRng, TrialStream, DEFAULT_SEED,
};
