//! Library side of the `zeta-strips` command-line tool.

pub mod commands;
pub mod plot;
pub mod record;

pub use commands::{Outcome, PlotRequest, Suite};
pub use record::{Cache, CacheEntry, RunRecord};
