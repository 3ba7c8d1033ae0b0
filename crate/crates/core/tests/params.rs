use std::f64::consts::PI;

use proptest::prelude::*;
use squeezekit_core::atomic::{builtin, coupling_constants, find_tensor_zero, AtomSpec, ExcitedLine, HalfInt};
use squeezekit_core::params::{
    cavity_tuning, compensation_field, derive_three_mode, derive_two_mode, residual_shift, tuning_report, CavitySpec,
    ThreeModeParams, TwoModeParams,
};
use squeezekit_core::Error;

fn he_cavity() -> CavitySpec {
    CavitySpec { kappa: 2.0 * PI * 1e8, n_ph: 4.33e7, rabi: 2.0 * PI * 4.26e3 }
}

fn yb_cavity() -> CavitySpec {
    CavitySpec { kappa: 2.0 * PI * 1e6, n_ph: 1e5, rabi: 2.0 * PI * 1e4 }
}

#[test]
fn helium_chain() {
    let two = derive_two_mode(&builtin::he3(), &he_cavity(), 5e10, -3.4, 0.0).unwrap();
    let om = two.omega_v.abs() / (2.0 * PI);
    assert!((om / 2.59e6 - 1.0).abs() < 0.02, "{om}");
    assert!((two.epsilon - 0.16).abs() < 0.01);
    let three = derive_three_mode(&two, 3.92e6, 19.6).unwrap();
    assert!((three.gamma_alpha_rate() / 4.22 - 1.0).abs() < 0.02, "{}", three.gamma_alpha_rate());
    // the printed Omega_V path must land in the same place
    let printed = ThreeModeParams::new(3.92e6, 19.6, 2.0 * PI * 1e8, 2.0 * PI * 2.59e6, 0.16).unwrap();
    assert!((printed.gamma_alpha_rate() / 4.22 - 1.0).abs() < 0.02);
}

#[test]
fn helium_omega_v_uses_f_three_halves() {
    let he = builtin::he3();
    let cav = he_cavity();
    let two = derive_two_mode(&he, &cav, 5e10, -3.4, 0.0).unwrap();
    let a = coupling_constants(&he, -3.4, cav.rabi_sq()).unwrap();
    let direct = a.alpha_v * (3.0 * 5e10 * cav.n_ph).sqrt() / 2.0;
    assert!((two.omega_v - direct).abs() <= 1e-12 * direct.abs());
}

#[test]
fn doubling_photons_doubles_gamma() {
    let atom = builtin::yb173();
    let mut cav = yb_cavity();
    let a = derive_two_mode(&atom, &cav, 1e4, 9.0, 0.0).unwrap();
    cav.n_ph *= 2.0;
    let b = derive_two_mode(&atom, &cav, 1e4, 9.0, 0.0).unwrap();
    assert!((b.gamma_big() / a.gamma_big() - 2.0).abs() < 1e-14);
}

#[test]
fn zero_atoms_flagged() {
    let p = derive_two_mode(&builtin::he3(), &he_cavity(), 0.0, -3.4, 1.0).unwrap();
    assert!(p.is_degenerate());
    assert_eq!(p.kappa_tilde(), None);
}

#[test]
fn bad_cavity_rejected() {
    let cav = CavitySpec { kappa: 0.0, n_ph: 1.0, rabi: 1.0 };
    assert!(derive_two_mode(&builtin::he3(), &cav, 1.0, -3.4, 0.0).is_err());
    assert!(TwoModeParams::new(1.0, 0.1, -1.0, 0.0).is_err());
    assert!(TwoModeParams::new(1.0, 0.1, 1.0, -0.1).is_err());
    assert!(ThreeModeParams::new(0.0, 0.0, 1.0, 1.0, 0.1).is_err());
}

#[test]
fn compensation_cancels_first_shift() {
    let atom = builtin::yb173();
    let cav = yb_cavity();
    let gyro = 2.0 * PI * 750.0;
    for x in [8.0, 8.5, 9.0, 9.5, 10.0] {
        let r = tuning_report(&atom, &cav, 1e4, x, gyro).unwrap();
        let a = coupling_constants(&atom, x, cav.rabi_sq()).unwrap();
        let scale = a.alpha_t.abs() * cav.n_ph * 4.0;
        assert!(r.delta_b[0].abs() <= 1e-12 * scale);
        assert_eq!(r.delta_b.len(), 5);
        // k(k-1) pattern of what remains
        for (k, d) in r.delta_b.iter().enumerate() {
            let k = (k + 1) as f64;
            let want = a.alpha_t * cav.n_ph * k * (k - 1.0);
            assert!((d - want).abs() <= 1e-10 * scale.max(want.abs()));
        }
    }
}

#[test]
fn compensation_sign_and_zero() {
    let atom = builtin::yb173();
    let cav = yb_cavity();
    let gyro = 2.0 * PI * 750.0;
    let zero = find_tensor_zero(&atom, (5.0, 30.0)).unwrap();
    let at_zero = compensation_field(&atom, &cav, zero, gyro).unwrap();
    let far = compensation_field(&atom, &cav, 8.0, gyro).unwrap();
    assert!(at_zero.abs() < 1e-6 * far.abs());
    let other_side = compensation_field(&atom, &cav, 12.0, gyro).unwrap();
    assert!(far.signum() != other_side.signum());
    assert_eq!(compensation_field(&atom, &cav, 9.0, 0.0), Err(Error::ZeroGyro));
}

#[test]
fn yb_b0_decreasing_over_8_to_10() {
    let atom = builtin::yb173();
    let cav = yb_cavity();
    // 173Yb has a negative nuclear moment
    let gyro = -2.0 * PI * 205.6;
    let b: Vec<f64> = (0..=200)
        .map(|k| compensation_field(&atom, &cav, 8.0 + 0.01 * k as f64, gyro).unwrap())
        .collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn cavity_tuning_cases() {
    let he = builtin::he3();
    let cav = he_cavity();
    let a = coupling_constants(&he, -3.4, cav.rabi_sq()).unwrap();
    let n = 5e10;
    let dc = cavity_tuning(&he, n, -3.4, &cav).unwrap();
    // effective detuning delta_c + alpha_t n f(2f-1)/3 equals (3/2) alpha_t n for f = 3/2
    let eff = dc + a.alpha_t * n * 1.5 * 2.0 / 3.0;
    assert!((eff - 1.5 * a.alpha_t * n).abs() <= 1e-12 * eff.abs());

    let half = AtomSpec {
        name: "half".into(),
        i: HalfInt::ZERO,
        j: HalfInt::HALF,
        f: HalfInt::HALF,
        lambda_m: 1e-6,
        gamma_sp: 1.0,
        lines: vec![ExcitedLine { j_prime: HalfInt::from_twice(3), f_prime: HalfInt::from_twice(3), offset_ghz: 0.0 }],
    };
    assert_eq!(cavity_tuning(&half, n, 2.0, &cav).unwrap(), 0.0);
}

#[test]
fn hybrid_special_cases() {
    let p = ThreeModeParams::new(2.0, 2.0, 10.0, 3.0, 0.2).unwrap();
    let s = 3.0 / 2f64.sqrt();
    assert!((p.omega_valpha() - s).abs() < 1e-15 && (p.omega_vbeta() - s).abs() < 1e-15);
    let q = ThreeModeParams::new(2.0, 1.0, 10.0, 3.0, 1.0).unwrap();
    assert_eq!(q.gamma0(), 0.0);
    assert_eq!(q.gamma_beta(), 6.0);
}

proptest! {
    #[test]
    fn hybrid_identities(gm in 1e-3f64..1e7, ratio in 1e-7f64..1.0, k in 1e-2f64..1e9, v in 1e-3f64..1e7, eps in -1.0f64..1.0) {
        let p = ThreeModeParams::new(gm, gm * ratio, k, v, eps).unwrap();
        let split = p.omega_valpha().powi(2) + p.omega_vbeta().powi(2);
        prop_assert!((split - v * v).abs() <= 1e-14 * v * v);
        let back = p.gamma_alpha_rate() * (p.gamma_m + p.gamma_f) / p.gamma_f;
        prop_assert!((back - p.gamma_big()).abs() <= 1e-13 * p.gamma_big());
        prop_assert!(p.gamma0() >= 0.0);
    }

    #[test]
    fn gamma_invariant_under_atom_photon_trade(c in 1e-3f64..1e3, n in 1e2f64..1e12) {
        let he = builtin::he3();
        let cav = he_cavity();
        let a = derive_two_mode(&he, &cav, n, -3.4, 0.0).unwrap();
        let cav2 = CavitySpec { n_ph: cav.n_ph / c, ..cav };
        let b = derive_two_mode(&he, &cav2, n * c, -3.4, 0.0).unwrap();
        prop_assert!((a.gamma_big() - b.gamma_big()).abs() <= 1e-12 * a.gamma_big());
    }

    #[test]
    fn residual_shift_vanishes_at_k1(gyro in 1.0f64..1e4, at in -1.0f64..1.0, n_ph in 1.0f64..1e8, twice_f in 1u32..12) {
        let f = twice_f as f64 / 2.0;
        let b0 = at * n_ph * (2.0 * f - 1.0) / gyro;
        let d = residual_shift(1, gyro, b0, at, n_ph, f);
        prop_assert!(d.abs() <= 1e-12 * (at * n_ph * 2.0 * f).abs().max(1e-300));
    }
}
