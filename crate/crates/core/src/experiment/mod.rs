//! Configured λ-ladder experiments and their reports.

pub mod config;
pub mod report;
pub mod runs;

pub use config::{parse_range, RunConfig};
pub use report::{Check, Comparison, LadderPoint, Measurement, Outcome, Report, Table, SCHEMA_VERSION};
pub use runs::{cantor_lower_bound, run_experiment, sample_points, EXPERIMENTS};

/// Cap the global thread pool from `CPL_THREADS` when set. Call once,
/// before any parallel work.
pub fn init_threads_from_env() -> crate::Result<()> {
    if let Ok(v) = std::env::var("CPL_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| crate::Error::Config(format!("CPL_THREADS: cannot parse {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| crate::Error::Config(e.to_string()))?;
    }
    Ok(())
}
