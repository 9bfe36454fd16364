//! Experiment harness for the three-level engine laboratory: configuration,
//! seeded end-to-end runs, trace files and figure-data reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::{InitialState, Overrides, RunConfig};
pub use error::{CliError, Result};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "QHE_THREADS";

/// Runs `f` on a rayon pool sized by `QHE_THREADS` (all cores when unset or
/// unparsable).
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
