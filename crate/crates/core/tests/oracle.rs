use proptest::prelude::*;
use squeezekit_core::moments::{integrate_three_mode, integrate_two_mode, three_mode_rhs, ThreeModeMoments};
use squeezekit_core::oracle::*;
use squeezekit_core::params::{ThreeModeParams, TwoModeParams};
use squeezekit_core::Error;

fn max_gap(p: &TwoModeParams, d: FockDims, t_end: f64, dt: f64) -> (f64, OracleDiagnostics) {
    let opts = OracleOptions { record_every: 25, ..Default::default() };
    let run = integrate_master_with(d, p, t_end, dt, &opts).unwrap_or_else(|e| panic!("{p:?} {e}"));
    let mom = integrate_two_mode(p, t_end, dt).unwrap();
    let mut gap: f64 = 0.0;
    for (t, s) in run.times.iter().zip(&run.states) {
        let k = mom.times.iter().position(|x| (x - t).abs() < 1e-9).unwrap();
        for (a, b) in s.to_array().iter().zip(mom.states[k].to_array()) {
            gap = gap.max((a - b).abs());
        }
    }
    (gap, run.diagnostics)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, max_shrink_iters: 4, ..ProptestConfig::default() })]

    #[test]
    fn oracle_matches_moments(v in 0.02f64..0.2, ratio in 5.0f64..20.0, eps in -0.5f64..1.0, g in 0.0f64..0.05) {
        let p = TwoModeParams::new(v, eps, v * ratio, g).unwrap();
        let t_end = 0.5 / p.gamma_big();
        let (gap, diag) = max_gap(&p, FockDims::new(16, 7).unwrap(), t_end.min(60.0), 0.02 / p.max_rate());
        prop_assert!(gap <= 1e-4, "gap {}", gap);
        prop_assert!(diag.max_trace_drift <= 1e-8);
        prop_assert!(diag.max_hermiticity <= 1e-10);
        prop_assert!(diag.min_eigenvalue >= -1e-8);
    }
}

#[test]
fn squeezing_visible_in_oracle() {
    let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
    let run = integrate_master(FockDims::new(14, 4).unwrap(), &p, 30.0, 0.02).unwrap();
    let end = run.states.last().unwrap();
    assert!(end.p2 < 0.5 && end.x2 > 0.5);
}

#[test]
fn no_coupling_stays_vacuum() {
    let p = TwoModeParams::new(0.0, 0.3, 1.0, 0.2).unwrap();
    let run = integrate_master(FockDims::new(4, 3).unwrap(), &p, 5.0, 0.01).unwrap();
    for s in &run.states {
        for (a, b) in s.to_array().iter().zip([0.5, 0.0, 0.5, 0.5, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

#[test]
fn leak_guard_trips() {
    let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
    let r = integrate_master(FockDims::new(4, 3).unwrap(), &p, 250.0, 0.02);
    assert!(matches!(r, Err(Error::TruncationLeak { .. })));
}

#[test]
fn step_guard() {
    let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
    assert!(matches!(integrate_master(FockDims::new(4, 3).unwrap(), &p, 1.0, 0.05), Err(Error::StepTooLarge { .. })));
}

#[test]
fn operators_are_hermitian_and_lower_shift() {
    let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
    let d = FockDims::new(5, 4).unwrap();
    let ops = build_operators(d, &p).unwrap();
    for m in [&ops.x, &ops.p, &ops.xc, &ops.pc, &ops.h] {
        assert!((m - m.adjoint()).norm() < 1e-14);
    }
    let n = d.total();
    for i in 0..n {
        for j in 0..n {
            if ops.a[(i, j)].norm() > 0.0 {
                // a lowers the atomic index by one and leaves the cavity index alone
                assert_eq!(i + 4, j);
            }
        }
    }
}

#[test]
fn three_mode_oracle_matches_moments() {
    let p = ThreeModeParams::new(0.3, 0.2, 2.0, 0.25, 0.4).unwrap();
    let d = ThreeFockDims { dim_alpha: 8, dim_beta: 5, dim_cavity: 4 };
    let dt = 0.02 / p.max_rate();
    let t_end = 8.0;
    let opts = OracleOptions { record_every: 50, ..Default::default() };
    let run = integrate_master_three(d, &p, t_end, dt, &opts).unwrap();
    let mom = integrate_three_mode(&p, t_end, dt).unwrap();
    let mut gap: f64 = 0.0;
    for (t, s) in run.times.iter().zip(&run.states) {
        let k = mom.times.iter().position(|x| (x - t).abs() < 1e-9).unwrap();
        for (a, b) in s.to_array().iter().zip(mom.states[k].to_array()) {
            gap = gap.max((a - b).abs());
        }
    }
    assert!(gap <= 1e-4, "{gap}");
    assert!(run.diagnostics.min_eigenvalue >= -1e-8);
    // sanity: the run actually moved away from the vacuum
    let last = run.states.last().unwrap();
    assert!((last.x.xa2 - 0.5).abs() > 1e-2);
    assert!(three_mode_rhs(&ThreeModeMoments::vacuum(), &p).p.pa2 == 0.0);
}

#[test]
fn three_mode_dims_guard() {
    let p = ThreeModeParams::new(0.3, 0.2, 2.0, 0.25, 0.4).unwrap();
    let d = ThreeFockDims { dim_alpha: 9, dim_beta: 4, dim_cavity: 4 };
    let r = integrate_master_three(d, &p, 1.0, 0.001, &OracleOptions::default());
    assert_eq!(r.err(), Some(Error::InvalidDims));
}
