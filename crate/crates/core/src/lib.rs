//! Sunflowers and spread set families.
//!
//! * [`set`] and [`family`]: bit-vector subsets and uniform families, with the
//!   JSON family format.
//! * [`sunflower`]: detection and exhaustive search.
//! * [`constructions`]: block-product (transversal) families.
//! * [`spread`]: spreadness certificates and violating sets.
//! * [`engine`]: random subsets, exact and Monte Carlo hit probabilities,
//!   random partitions, and the coupling/tail checks.
//! * [`extraction`]: recursive sunflower extraction.
//! * [`exact_sun`]: exact `Sun(p, k)` for tiny parameters.
//! * [`cli`]: the `sunflower` command-line front end.

pub mod cli;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod exact_sun;
pub mod extraction;
pub mod family;
pub mod set;
pub mod spread;
pub mod sunflower;

pub use error::{Error, Result};
pub use family::{FamilyFile, SetFamily};
pub use set::{GroundSet, KSet, Subset};
pub use sunflower::{is_sunflower, Sunflower};
