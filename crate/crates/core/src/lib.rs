//! Incomparable set families and d-exceeding sequences over `[k]`.
//!
//! * [`sets`]: subsets as bitmasks, families, `⊢`, closures, Kleitman ratios.
//! * [`construct`]: upscaling, middle-layer, block and threshold families.
//! * [`sequence`]: d-exceeding sequences of sets and families, reference witnesses.
//! * [`search`]: exhaustive oracles (δ(k), longest sequences, family searches).
//! * [`bounds`]: closed-form bound evaluators.
//! * [`io`] and [`cli`]: JSON file formats and the command-line front end.

pub mod bounds;
pub mod cli;
pub mod construct;
pub mod error;
pub mod io;
pub mod search;
pub mod sequence;
pub mod sets;

pub use error::{Error, Result};
pub use sets::{Family, GroundSize, Subset};
