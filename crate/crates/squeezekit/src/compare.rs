//! Fock-space oracle against the Gaussian moment equations on a shared grid.

use squeezekit_core::moments::{integrate_three_mode_sampled, integrate_two_mode_sampled, ThreeModeMoments, TwoModeMoments};
use squeezekit_core::oracle::{integrate_master_three, integrate_master_with, FockDims, OracleDiagnostics, OracleOptions, ThreeFockDims};
use squeezekit_core::params::{ThreeModeParams, TwoModeParams};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub names: Vec<&'static str>,
    /// Physical times.
    pub times: Vec<f64>,
    pub oracle: Vec<Vec<f64>>,
    pub gaussian: Vec<Vec<f64>>,
    pub diagnostics: OracleDiagnostics,
}

impl Comparison {
    pub fn max_abs_diff(&self) -> f64 {
        self.oracle
            .iter()
            .zip(&self.gaussian)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest difference per moment.
    pub fn per_moment(&self) -> Vec<(&'static str, f64)> {
        (0..self.names.len())
            .map(|k| {
                let d = self.oracle.iter().zip(&self.gaussian).map(|(a, b)| (a[k] - b[k]).abs()).fold(0.0, f64::max);
                (self.names[k], d)
            })
            .collect()
    }
}

pub fn compare_two_mode(d: FockDims, p: &TwoModeParams, t_end: f64, dt: f64, opts: &OracleOptions) -> Result<Comparison> {
    let run = integrate_master_with(d, p, t_end, dt, opts)?;
    let mom = integrate_two_mode_sampled(p, t_end, dt, opts.record_every)?;
    debug_assert_eq!(run.times, mom.times);
    Ok(Comparison {
        names: TwoModeMoments::NAMES.to_vec(),
        times: run.times,
        oracle: run.states.iter().map(|s| s.to_array().to_vec()).collect(),
        gaussian: mom.states.iter().map(|s| s.to_array().to_vec()).collect(),
        diagnostics: run.diagnostics,
    })
}

pub fn compare_three_mode(
    d: ThreeFockDims,
    p: &ThreeModeParams,
    t_end: f64,
    dt: f64,
    opts: &OracleOptions,
) -> Result<Comparison> {
    let run = integrate_master_three(d, p, t_end, dt, opts)?;
    let mom = integrate_three_mode_sampled(p, t_end, dt, opts.record_every)?;
    debug_assert_eq!(run.times, mom.times);
    Ok(Comparison {
        names: ThreeModeMoments::NAMES.to_vec(),
        times: run.times,
        oracle: run.states.iter().map(|s| s.to_array().to_vec()).collect(),
        gaussian: mom.states.iter().map(|s| s.to_array().to_vec()).collect(),
        diagnostics: run.diagnostics,
    })
}
