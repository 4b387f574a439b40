//! Exhaustive generation of closed pairs and their size statistics.

mod catalog;
pub mod frame;
mod search;
mod stats;

pub use catalog::{brute_force, Catalog, ClassEntry};
pub use search::{enumerate, Checkpoint, EnumOptions};
pub use stats::{parse_size_csv, stats, verify_against_reference, ReferenceDiff, SizeStats};
