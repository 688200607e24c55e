//! Parallel driver for the property fuzzer.
//!
//! Trials are independent and seeded from `(seed, property, trial)`, so they
//! run on a rayon pool and are collected back in trial order; the report is
//! identical to the sequential one for any thread count.

use rayon::prelude::*;

use sjk_core::oracle::fuzz::{aggregate, run_trial, trial_count, FuzzConfig, FuzzReport, Property};

use crate::error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SJK_THREADS";

/// Thread cap from `SJK_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, found {s:?}"))),
        },
    }
}

pub fn run(cfg: &FuzzConfig, properties: &[Property], threads: Option<usize>) -> Result<FuzzReport, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let jobs: Vec<(usize, usize)> =
        properties.iter().enumerate().flat_map(|(i, &p)| (0..trial_count(cfg, p)).map(move |t| (i, t))).collect();
    let outcomes: Vec<_> = pool.install(|| jobs.par_iter().map(|&(i, t)| run_trial(cfg, properties[i], t)).collect());
    let mut outcomes = outcomes.into_iter();
    let reports = properties
        .iter()
        .map(|&p| aggregate(cfg, p, outcomes.by_ref().take(trial_count(cfg, p)).collect()))
        .collect();
    Ok(FuzzReport { params: cfg.params, seed: cfg.seed, properties: reports })
}
