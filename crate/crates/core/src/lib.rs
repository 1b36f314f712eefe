pub mod brauer;
pub mod cli;
pub mod error;
pub mod format;
pub mod linalg;
pub mod presentation;
pub mod quiver;
pub mod radcube;
pub mod random;
pub mod recovery;
pub mod representation;
pub mod scalar;

pub use error::{Error, Result, Violation};
