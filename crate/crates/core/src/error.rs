use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set must have at least one element")]
    EmptyGround,
    #[error("ground set of size {size} exceeds the supported maximum of {max}")]
    GroundTooLarge { size: usize, max: usize },
    #[error("element {element} is outside the ground set of size {ground}")]
    ElementOutOfRange { element: usize, ground: usize },
    #[error("set {set:?} has {found} elements, family is {expected}-uniform")]
    WrongCardinality { set: Vec<usize>, expected: usize, found: usize },
    #[error("set {0:?} appears more than once")]
    DuplicateSet(Vec<usize>),
    #[error("element list {0:?} is not strictly increasing")]
    UnsortedElements(Vec<usize>),
    #[error("input must contain at least one set")]
    EmptyInput,
    #[error("the conditioning set T must be non-empty")]
    EmptyConditioningSet,
    #[error("|T| = {t} exceeds the uniformity k = {k}")]
    ConditioningSetTooLarge { t: usize, k: usize },
    #[error("{count} sets exceed the materialization cap of {cap}; use the streaming iterator")]
    FamilyTooLarge { count: u128, cap: usize },
    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "exact computation infeasible: ground set {ground} > {ground_cap} and family {family} > {family_cap}"
    )]
    ExactInfeasible { ground: usize, ground_cap: usize, family: usize, family_cap: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Checks `lo < value < hi` (open) or `lo < value <= hi` when `closed_hi`.
pub(crate) fn check_probability(
    name: &'static str,
    value: f64,
    closed_hi: Option<f64>,
) -> Result<()> {
    let ok = match closed_hi {
        Some(hi) => value > 0.0 && value <= hi,
        None => value > 0.0 && value < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: match closed_hi {
                Some(h) if h == 0.5 => "(0, 1/2]",
                Some(_) => "(0, hi]",
                None => "(0, 1)",
            },
        })
    }
}
