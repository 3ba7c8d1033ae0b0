//! Experiment-level rates and tuning conditions.

use alloc::vec::Vec;

use crate::atomic::{coupling_constants, epsilon_ratio, AtomSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavitySpec {
    /// Photon loss rate, rad/s.
    pub kappa: f64,
    pub n_ph: f64,
    /// Single-photon Rabi pulsation, rad/s.
    pub rabi: f64,
}

impl CavitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.kappa > 0.0 && self.n_ph > 0.0 && self.rabi > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput("cavity kappa, n_ph and rabi must be positive"))
        }
    }

    pub fn rabi_sq(&self) -> f64 {
        self.rabi * self.rabi
    }
}

/// Two-mode problem: collective spin mode plus cavity mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeParams {
    /// Vector coupling, rad/s.
    pub omega_v: f64,
    pub epsilon: f64,
    /// Cavity loss, rad/s.
    pub kappa: f64,
    /// Atomic decoherence, rad/s.
    pub gamma: f64,
}

impl TwoModeParams {
    pub fn new(omega_v: f64, epsilon: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let p = TwoModeParams { omega_v, epsilon, kappa, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units where the measurement rate is 1.
    pub fn dimensionless(epsilon: f64, gamma_tilde: f64, kappa_tilde: f64) -> Result<Self> {
        if !(kappa_tilde > 0.0) {
            return Err(Error::InvalidInput("kappa_tilde must be positive"));
        }
        Self::new(libm::sqrt(kappa_tilde / 2.0), epsilon, kappa_tilde, gamma_tilde)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_v, self.epsilon, self.kappa, self.gamma]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("two-mode parameters must be finite"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidInput("kappa must be positive"));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidInput("gamma must be non-negative"));
        }
        Ok(())
    }

    pub fn omega_t(&self) -> f64 {
        self.epsilon * self.omega_v
    }

    /// Measurement rate 2 Omega_V^2 / kappa.
    pub fn gamma_big(&self) -> f64 {
        2.0 * self.omega_v * self.omega_v / self.kappa
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.gamma_big() > 0.0)
    }

    pub fn gamma_tilde(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| self.gamma / self.gamma_big())
    }

    pub fn kappa_tilde(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| self.kappa / self.gamma_big())
    }

    /// Reporting heuristic for the cavity elimination; never gates anything.
    pub fn adiabatic_ok(&self) -> bool {
        self.kappa >= 10.0 * libm::fabs(self.omega_v) && self.kappa >= 10.0 * self.gamma
    }

    pub fn max_rate(&self) -> f64 {
        self.kappa.max(libm::fabs(self.omega_v)).max(self.gamma)
    }
}

/// Three-mode helium problem in the hybrid basis (alpha slow, beta fast).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeModeParams {
    /// Exchange rate of a metastable atom, 1/s.
    pub gamma_m: f64,
    /// Exchange rate of a ground-state atom, 1/s.
    pub gamma_f: f64,
    pub kappa: f64,
    pub omega_v: f64,
    pub epsilon: f64,
}

impl ThreeModeParams {
    pub fn new(gamma_m: f64, gamma_f: f64, kappa: f64, omega_v: f64, epsilon: f64) -> Result<Self> {
        let p = ThreeModeParams { gamma_m, gamma_f, kappa, omega_v, epsilon };
        p.validate()?;
        Ok(p)
    }

    /// Units with Omega_V = 1, from gamma_beta / Omega_V, kappa / Omega_V and
    /// the ratio gamma_f / gamma_m.
    pub fn from_ratios(epsilon: f64, gamma_beta: f64, kappa: f64, gamma_ratio: f64) -> Result<Self> {
        let sum = gamma_beta / 2.0;
        let gamma_f = sum * gamma_ratio / (1.0 + gamma_ratio);
        Self::new(sum - gamma_f, gamma_f, kappa, 1.0, epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma_m, self.gamma_f, self.kappa, self.omega_v, self.epsilon];
        if !all.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("three-mode parameters must be finite"));
        }
        if self.gamma_m < 0.0 || self.gamma_f < 0.0 || !(self.gamma_m + self.gamma_f > 0.0) {
            return Err(Error::InvalidInput("exchange rates must be non-negative with positive sum"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidInput("kappa must be positive"));
        }
        Ok(())
    }

    pub fn gamma_beta(&self) -> f64 {
        2.0 * (self.gamma_m + self.gamma_f)
    }

    pub fn omega_valpha(&self) -> f64 {
        libm::sqrt(self.gamma_f / (self.gamma_f + self.gamma_m)) * self.omega_v
    }

    pub fn omega_vbeta(&self) -> f64 {
        libm::sqrt(self.gamma_m / (self.gamma_f + self.gamma_m)) * self.omega_v
    }

    pub fn omega_talpha(&self) -> f64 {
        self.epsilon * self.omega_valpha()
    }

    pub fn omega_tbeta(&self) -> f64 {
        self.epsilon * self.omega_vbeta()
    }

    /// Measurement rate of the slow mode, 2 Omega_Valpha^2 / kappa.
    pub fn gamma_alpha_rate(&self) -> f64 {
        let v = self.omega_valpha();
        2.0 * v * v / self.kappa
    }

    /// Rate of the identity jump left after eliminating beta and the cavity.
    pub fn gamma0(&self) -> f64 {
        let d = self.omega_tbeta() - self.omega_vbeta();
        d * d / (self.kappa + self.gamma_beta())
    }

    /// Two-mode measurement rate 2 Omega_V^2 / kappa of the unsplit coupling.
    pub fn gamma_big(&self) -> f64 {
        2.0 * self.omega_v * self.omega_v / self.kappa
    }

    pub fn max_rate(&self) -> f64 {
        self.kappa.max(self.gamma_beta()).max(libm::fabs(self.omega_v))
    }
}

/// Omega_V, epsilon and the rate set for an atom in a driven cavity.
pub fn derive_two_mode(
    atom: &AtomSpec,
    cavity: &CavitySpec,
    n_atoms: f64,
    detuning_ghz: f64,
    gamma: f64,
) -> Result<TwoModeParams> {
    cavity.validate()?;
    if !(n_atoms >= 0.0) {
        return Err(Error::InvalidInput("n_atoms must be non-negative"));
    }
    let c = coupling_constants(atom, detuning_ghz, cavity.rabi_sq())?;
    let epsilon = epsilon_ratio(atom, detuning_ghz)?;
    let omega_v = libm::sqrt(n_atoms * cavity.n_ph * atom.f.value() / 2.0) * c.alpha_v;
    TwoModeParams::new(omega_v, epsilon, cavity.kappa, gamma)
}

/// Field B0 (gauss for `gyro` in rad/s/G) that cancels the k = 1 residual shift.
pub fn compensation_field(atom: &AtomSpec, cavity: &CavitySpec, detuning_ghz: f64, gyro: f64) -> Result<f64> {
    if gyro == 0.0 || !gyro.is_finite() {
        return Err(Error::ZeroGyro);
    }
    let c = coupling_constants(atom, detuning_ghz, cavity.rabi_sq())?;
    Ok(c.alpha_t * cavity.n_ph * (2.0 * atom.f.value() - 1.0) / gyro)
}

/// Empty-cavity detuning delta_c (rad/s) realizing the tuning condition.
pub fn cavity_tuning(atom: &AtomSpec, n_atoms: f64, detuning_ghz: f64, cavity: &CavitySpec) -> Result<f64> {
    let c = coupling_constants(atom, detuning_ghz, cavity.rabi_sq())?;
    let f = atom.f.value();
    Ok(c.alpha_t * n_atoms * f * (f - 0.5) - c.alpha_t * n_atoms * f * (2.0 * f - 1.0) / 3.0)
}

/// Residual shift of the k-th Holstein-Primakoff mode, rad/s.
pub fn residual_shift(k: u32, gyro: f64, b0: f64, alpha_t: f64, n_ph: f64, f: f64) -> f64 {
    let k = k as f64;
    k * gyro * b0 - alpha_t * n_ph * k * (2.0 * f - k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningReport {
    pub b0_gauss: f64,
    pub delta_c: f64,
    /// delta_B(k) for k = 1..=2f.
    pub delta_b: Vec<f64>,
}

pub fn tuning_report(
    atom: &AtomSpec,
    cavity: &CavitySpec,
    n_atoms: f64,
    detuning_ghz: f64,
    gyro: f64,
) -> Result<TuningReport> {
    let b0 = compensation_field(atom, cavity, detuning_ghz, gyro)?;
    let delta_c = cavity_tuning(atom, n_atoms, detuning_ghz, cavity)?;
    let c = coupling_constants(atom, detuning_ghz, cavity.rabi_sq())?;
    let f = atom.f.value();
    let delta_b = (1..=atom.f.twice())
        .map(|k| residual_shift(k, gyro, b0, c.alpha_t, cavity.n_ph, f))
        .collect();
    Ok(TuningReport { b0_gauss: b0, delta_c, delta_b })
}

/// Hybrid-mode rates from the two-mode helium couplings.
pub fn derive_three_mode(two: &TwoModeParams, gamma_m: f64, gamma_f: f64) -> Result<ThreeModeParams> {
    ThreeModeParams::new(gamma_m, gamma_f, two.kappa, two.omega_v, two.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::builtin;

    #[test]
    fn zero_atoms_is_degenerate() {
        let cav = CavitySpec { kappa: 1e6, n_ph: 1e5, rabi: 1e4 };
        let p = derive_two_mode(&builtin::yb173(), &cav, 0.0, 9.0, 0.0).unwrap();
        assert_eq!(p.omega_v, 0.0);
        assert!(p.is_degenerate());
        assert_eq!(p.gamma_tilde(), None);
    }

    #[test]
    fn symmetric_split() {
        let p = ThreeModeParams::new(3.0, 3.0, 10.0, 2.0, 0.2).unwrap();
        let r = 2.0 / libm::sqrt(2.0);
        assert!((p.omega_valpha() - r).abs() < 1e-15);
        assert!((p.omega_vbeta() - r).abs() < 1e-15);
    }

    #[test]
    fn eps_one_has_no_identity_jump() {
        let p = ThreeModeParams::new(3.0, 0.1, 10.0, 2.0, 1.0).unwrap();
        assert_eq!(p.gamma0(), 0.0);
    }

    #[test]
    fn compensation_zeroes_first_shift() {
        let atom = builtin::he3();
        let cav = CavitySpec { kappa: 1e8, n_ph: 4.33e7, rabi: 2.0e4 };
        let gyro = 1.2e7;
        let r = tuning_report(&atom, &cav, 5e10, -3.4, gyro).unwrap();
        let c = coupling_constants(&atom, -3.4, cav.rabi_sq()).unwrap();
        let scale = libm::fabs(c.alpha_t * cav.n_ph);
        assert!(r.delta_b[0].abs() <= 1e-12 * scale);
        assert_eq!(r.delta_b.len(), 3);
        assert_eq!(compensation_field(&atom, &cav, -3.4, 0.0), Err(Error::ZeroGyro));
    }

    #[test]
    fn he_tuning_condition() {
        // delta_tilde = delta_c + alpha_t n f (2f-1)/3 must equal (3/2) alpha_t n.
        let atom = builtin::he3();
        let cav = CavitySpec { kappa: 1e8, n_ph: 4.33e7, rabi: 2.0e4 };
        let n = 5e10;
        let dc = cavity_tuning(&atom, n, -3.4, &cav).unwrap();
        let at = coupling_constants(&atom, -3.4, cav.rabi_sq()).unwrap().alpha_t;
        let dt = dc + at * n * 1.5 * 2.0 / 3.0;
        assert!((dt / (1.5 * at * n) - 1.0).abs() < 1e-12);
    }
}
