//! Bias benchmark with replicates spread over a rayon pool.

use levy_ig_core::inference::{aggregate, run_replicate, BenchmarkConfig, BenchmarkReport};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::{nums, object};

/// Environment variable capping the number of benchmark threads.
pub const THREADS_ENV: &str = "LEVY_IG_THREADS";

/// Thread cap from `LEVY_IG_THREADS`; `None` (machine parallelism) when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Bench(format!("{THREADS_ENV}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Bench(format!(
                "{THREADS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

/// Runs every replicate, in parallel when `threads` allows, and aggregates in
/// replicate order, so the report does not depend on scheduling.
pub fn parallel_bias_benchmark(
    cfg: &BenchmarkConfig,
    threads: Option<usize>,
) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Bench(e.to_string()))?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| (r, run_replicate(cfg, r)))
            .collect()
    });
    Ok(aggregate(cfg, &outcomes)?)
}

pub fn report_json(r: &BenchmarkReport) -> Value {
    object([
        ("mean_bias_plain", nums(&r.mean_bias_plain)),
        ("mean_bias_penalized", nums(&r.mean_bias_penalized)),
        ("rmse_plain", nums(&r.rmse_plain)),
        ("rmse_penalized", nums(&r.rmse_penalized)),
        ("failures", r.failures.into()),
        ("replicates", r.replicates.into()),
    ])
}
