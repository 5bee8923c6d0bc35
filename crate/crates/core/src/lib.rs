//! Exact p-adic linear algebra for Witt vectors, isocrystals, filtered
//! modules, formal groups, 1-motive bookkeeping and formal period spaces.

pub mod batch;
pub mod error;
pub mod filtered;
pub mod fixtures;
pub mod formal_group;
pub mod isocrystal;
pub mod linalg;
pub mod motive;
pub mod padic;
pub mod par;
pub mod periods;
pub mod witt;

pub use error::{Error, Result};
