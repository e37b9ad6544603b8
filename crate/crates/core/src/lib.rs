pub mod angular;
pub mod config;
pub mod coupling;
pub mod error;
pub mod field;
pub mod halfint;
pub mod identities;
pub mod par;
pub mod pumping;
pub mod scheme;
pub mod surd;

pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use surd::{Surd, SurdSum};
