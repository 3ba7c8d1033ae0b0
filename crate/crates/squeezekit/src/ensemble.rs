use rayon::prelude::*;
use squeezekit_core::stochastic::{simulate_trajectory, Ensemble, EnsembleSpec};

use crate::error::Result;

/// Worker count from `SQUEEZEKIT_THREADS`, else rayon's default.
pub fn thread_count() -> Option<usize> {
    std::env::var("SQUEEZEKIT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Parallel ensemble. Output is identical to the serial run because each
/// trajectory owns its noise stream and results are kept in index order.
pub fn run_ensemble_par(spec: &EnsembleSpec) -> Result<Ensemble> {
    spec.validate()?;
    let work = || {
        (0..spec.n_traj as u64)
            .into_par_iter()
            .map(|i| simulate_trajectory(spec, i))
            .collect::<std::result::Result<Vec<_>, _>>()
    };
    let records = match thread_count() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }?;
    Ok(Ensemble::from_records(*spec, records))
}
