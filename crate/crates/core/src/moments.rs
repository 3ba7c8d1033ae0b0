//! Second-moment dynamics of the two- and three-mode Gaussian problems.

use alloc::vec::Vec;

use crate::ode;
use crate::params::{ThreeModeParams, TwoModeParams};
use crate::{Error, Result};

/// Symmetrized second moments of the two-mode problem.
///
/// The P-sector is (p2, p_xc, xc2) and the X-sector is (x2, x_pc, pc2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeMoments {
    pub p2: f64,
    pub p_xc: f64,
    pub xc2: f64,
    pub x2: f64,
    pub x_pc: f64,
    pub pc2: f64,
}

impl TwoModeMoments {
    pub const NAMES: [&'static str; 6] = ["p2", "p_xc", "xc2", "x2", "x_pc", "pc2"];

    pub const fn vacuum() -> Self {
        TwoModeMoments { p2: 0.5, p_xc: 0.0, xc2: 0.5, x2: 0.5, x_pc: 0.0, pc2: 0.5 }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.p2, self.p_xc, self.xc2, self.x2, self.x_pc, self.pc2]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        TwoModeMoments { p2: a[0], p_xc: a[1], xc2: a[2], x2: a[3], x_pc: a[4], pc2: a[5] }
    }
}

/// Time derivative of the two-mode moments, physical time.
pub fn two_mode_rhs(s: &TwoModeMoments, p: &TwoModeParams) -> TwoModeMoments {
    let (v, t, k, g) = (p.omega_v, p.omega_t(), p.kappa, p.gamma);
    TwoModeMoments {
        p2: -2.0 * t * s.p_xc - g * (s.p2 - 0.5),
        p_xc: -0.5 * (k + g) * s.p_xc + v * s.p2 - t * s.xc2,
        xc2: -k * (s.xc2 - 0.5) + 2.0 * v * s.p_xc,
        x2: 2.0 * v * s.x_pc - g * (s.x2 - 0.5),
        x_pc: -0.5 * (k + g) * s.x_pc - t * s.x2 + v * s.pc2,
        pc2: -k * (s.pc2 - 0.5) - 2.0 * t * s.x_pc,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentTrajectory<S> {
    /// Physical times, strictly increasing.
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S: Copy> MomentTrajectory<S> {
    pub fn last(&self) -> S {
        *self.states.last().expect("trajectory holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_step(dt: f64, t_end: f64, max_rate: f64, factor: f64) -> Result<()> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput("t_end must be finite and non-negative"));
    }
    let max_dt = if max_rate > 0.0 { factor / max_rate } else { f64::INFINITY };
    if !(dt > 0.0) || dt > max_dt {
        return Err(Error::StepTooLarge { dt, max_dt });
    }
    Ok(())
}

/// RK4 from the vacuum, keeping every step.
pub fn integrate_two_mode(p: &TwoModeParams, t_end: f64, dt: f64) -> Result<MomentTrajectory<TwoModeMoments>> {
    integrate_two_mode_sampled(p, t_end, dt, 1)
}

/// RK4 from the vacuum, keeping every `record_every`-th step and the end point.
pub fn integrate_two_mode_sampled(
    p: &TwoModeParams,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<MomentTrajectory<TwoModeMoments>> {
    p.validate()?;
    check_step(dt, t_end, p.max_rate(), 0.05)?;
    let rhs = |y: &[f64; 6]| two_mode_rhs(&TwoModeMoments::from_array(*y), p).to_array();
    let (times, ys) = ode::integrate(TwoModeMoments::vacuum().to_array(), t_end, dt, record_every, rhs);
    Ok(MomentTrajectory { times, states: ys.into_iter().map(TwoModeMoments::from_array).collect() })
}

/// ⟨P²⟩(τ) after adiabatic elimination of the cavity, τ = Γt.
///
/// With both rates zero the variance is conserved; the error carries that
/// case and callers use 1/2.
pub fn adiabatic_p_variance(tau: f64, eps: f64, gamma_tilde: f64) -> Result<f64> {
    let r = 2.0 * eps + gamma_tilde;
    if eps == 0.0 && gamma_tilde == 0.0 {
        return Err(Error::DegenerateRate);
    }
    Ok(0.5 * (2.0 * eps * eps + gamma_tilde) / r + eps * (1.0 - eps) / r * libm::exp(-r * tau))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeterministicLimits {
    pub tau_deter: f64,
    pub var_p: f64,
    pub var_x: f64,
    /// Long-time ⟨P²⟩ including atomic decoherence; `None` if Γ = 0.
    pub var_p_decoherence: Option<f64>,
}

pub fn deterministic_limits(p: &TwoModeParams) -> Result<DeterministicLimits> {
    let eps = p.epsilon;
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon);
    }
    let var_p_decoherence = p.gamma_tilde().map(|g| 0.5 * (2.0 * eps * eps + g) / (2.0 * eps + g));
    Ok(DeterministicLimits {
        tau_deter: 1.0 / (2.0 * eps),
        var_p: eps / 2.0,
        var_x: 1.0 / (2.0 * eps),
        var_p_decoherence,
    })
}

/// X-sector of the three-mode problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeX {
    pub xa2: f64,
    pub xb2: f64,
    pub xa_pc: f64,
    pub xb_pc: f64,
    pub xa_xb: f64,
    pub pc2: f64,
}

/// P-sector of the three-mode problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeP {
    pub pa2: f64,
    pub pb2: f64,
    pub pa_xc: f64,
    pub pb_xc: f64,
    pub pa_pb: f64,
    pub xc2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeModeMoments {
    pub x: ThreeX,
    pub p: ThreeP,
}

impl ThreeX {
    pub fn to_array(&self) -> [f64; 6] {
        [self.xa2, self.xb2, self.xa_pc, self.xb_pc, self.xa_xb, self.pc2]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        ThreeX { xa2: a[0], xb2: a[1], xa_pc: a[2], xb_pc: a[3], xa_xb: a[4], pc2: a[5] }
    }
}

impl ThreeP {
    pub fn to_array(&self) -> [f64; 6] {
        [self.pa2, self.pb2, self.pa_xc, self.pb_xc, self.pa_pb, self.xc2]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        ThreeP { pa2: a[0], pb2: a[1], pa_xc: a[2], pb_xc: a[3], pa_pb: a[4], xc2: a[5] }
    }
}

impl ThreeModeMoments {
    pub const NAMES: [&'static str; 12] = [
        "xa2", "xb2", "xa_pc", "xb_pc", "xa_xb", "pc2", "pa2", "pb2", "pa_xc", "pb_xc", "pa_pb", "xc2",
    ];

    pub const fn vacuum() -> Self {
        ThreeModeMoments {
            x: ThreeX { xa2: 0.5, xb2: 0.5, xa_pc: 0.0, xb_pc: 0.0, xa_xb: 0.0, pc2: 0.5 },
            p: ThreeP { pa2: 0.5, pb2: 0.5, pa_xc: 0.0, pb_xc: 0.0, pa_pb: 0.0, xc2: 0.5 },
        }
    }

    pub fn to_array(&self) -> [f64; 12] {
        let mut a = [0.0; 12];
        a[..6].copy_from_slice(&self.x.to_array());
        a[6..].copy_from_slice(&self.p.to_array());
        a
    }

    pub fn from_array(a: [f64; 12]) -> Self {
        let mut x = [0.0; 6];
        let mut p = [0.0; 6];
        x.copy_from_slice(&a[..6]);
        p.copy_from_slice(&a[6..]);
        ThreeModeMoments { x: ThreeX::from_array(x), p: ThreeP::from_array(p) }
    }
}

struct Rates {
    va: f64,
    vb: f64,
    ta: f64,
    tb: f64,
    gb: f64,
    k: f64,
}

fn rates(p: &ThreeModeParams) -> Rates {
    Rates {
        va: p.omega_valpha(),
        vb: p.omega_vbeta(),
        ta: p.omega_talpha(),
        tb: p.omega_tbeta(),
        gb: p.gamma_beta(),
        k: p.kappa,
    }
}

pub fn three_mode_rhs(s: &ThreeModeMoments, p: &ThreeModeParams) -> ThreeModeMoments {
    let Rates { va, vb, ta, tb, gb, k } = rates(p);
    let x = &s.x;
    let q = &s.p;
    ThreeModeMoments {
        x: ThreeX {
            xa2: 2.0 * va * x.xa_pc,
            xb2: -gb * (x.xb2 - 0.5) + 2.0 * vb * x.xb_pc,
            xa_pc: -0.5 * k * x.xa_pc - tb * x.xa_xb - ta * x.xa2 + va * x.pc2,
            xb_pc: -0.5 * (gb + k) * x.xb_pc - ta * x.xa_xb - tb * x.xb2 + vb * x.pc2,
            xa_xb: -0.5 * gb * x.xa_xb + vb * x.xa_pc + va * x.xb_pc,
            pc2: -k * (x.pc2 - 0.5) - 2.0 * ta * x.xa_pc - 2.0 * tb * x.xb_pc,
        },
        p: ThreeP {
            pa2: -2.0 * ta * q.pa_xc,
            pb2: -gb * (q.pb2 - 0.5) - 2.0 * tb * q.pb_xc,
            pa_xc: -0.5 * k * q.pa_xc + vb * q.pa_pb + va * q.pa2 - ta * q.xc2,
            pb_xc: -0.5 * (gb + k) * q.pb_xc + va * q.pa_pb + vb * q.pb2 - tb * q.xc2,
            pa_pb: -0.5 * gb * q.pa_pb - tb * q.pa_xc - ta * q.pb_xc,
            xc2: -k * (q.xc2 - 0.5) + 2.0 * va * q.pa_xc + 2.0 * vb * q.pb_xc,
        },
    }
}

pub fn integrate_three_mode(p: &ThreeModeParams, t_end: f64, dt: f64) -> Result<MomentTrajectory<ThreeModeMoments>> {
    integrate_three_mode_sampled(p, t_end, dt, 1)
}

pub fn integrate_three_mode_sampled(
    p: &ThreeModeParams,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<MomentTrajectory<ThreeModeMoments>> {
    p.validate()?;
    check_step(dt, t_end, p.max_rate(), 0.05)?;
    let rhs = |y: &[f64; 12]| three_mode_rhs(&ThreeModeMoments::from_array(*y), p).to_array();
    let (times, ys) = ode::integrate(ThreeModeMoments::vacuum().to_array(), t_end, dt, record_every, rhs);
    Ok(MomentTrajectory { times, states: ys.into_iter().map(ThreeModeMoments::from_array).collect() })
}

/// Stationary three-mode moments. The X-sector has no stationary state when
/// epsilon <= 0 (⟨X_α²⟩ grows without bound), which is reported as `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeModeStationary {
    pub x: Option<ThreeX>,
    pub p: ThreeP,
}

impl ThreeModeStationary {
    pub fn x_unbounded(&self) -> bool {
        self.x.is_none()
    }

    pub fn moments(&self) -> Option<ThreeModeMoments> {
        self.x.map(|x| ThreeModeMoments { x, p: self.p })
    }
}

/// Closed-form stationary solution of both sectors.
///
/// Both sectors reduce to one scalar equation for the beta-cavity
/// correlation; everything else follows by back-substitution.
pub fn three_mode_stationary_exact(p: &ThreeModeParams) -> Result<ThreeModeStationary> {
    p.validate()?;
    let Rates { va, vb, ta, tb, gb, k } = rates(p);
    let eps = p.epsilon;
    if !(gb > 0.0) {
        return Err(Error::InvalidInput("gamma_beta must be positive"));
    }
    let gk = gb + k;
    let bracket = 1.0 + 4.0 * va * ta / (gb * gk) + 4.0 * vb * tb / (gb * gk) + 4.0 * vb * tb / (k * gk);
    if !(bracket > 0.0) {
        return Err(Error::SingularBracket);
    }
    let y = (1.0 - eps) * vb / gk / bracket;
    let s = 1.0 / k + 1.0 / gb;

    let pp = ThreeP {
        pa2: eps / 2.0 + 2.0 * eps * vb * s * y,
        pb2: 0.5 - 2.0 * tb / gb * y,
        pa_xc: 0.0,
        pb_xc: y,
        pa_pb: -2.0 * ta / gb * y,
        xc2: 0.5 + 2.0 * vb / k * y,
    };
    let x = (eps > 0.0).then(|| ThreeX {
        xa2: 1.0 / (2.0 * eps) - 2.0 * vb * s * y,
        xb2: 0.5 + 2.0 * vb / gb * y,
        xa_pc: 0.0,
        xb_pc: y,
        xa_xb: 2.0 * va / gb * y,
        pc2: 0.5 - 2.0 * tb / k * y,
    });
    Ok(ThreeModeStationary { x, p: pp })
}

/// First-order-in-epsilon stationary variances, valid for γ_β, κ ≫ Ω_V.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderEpsVariances {
    /// `None` at epsilon <= 0 where the leading 1/(2ε) term diverges.
    pub xa2: Option<f64>,
    pub xb2: f64,
    pub pc2: f64,
    pub pa2: f64,
    pub pb2: f64,
    pub xc2: f64,
}

pub fn three_mode_stationary_order_eps(p: &ThreeModeParams) -> OrderEpsVariances {
    let (v2, gb, k, eps) = (p.omega_v * p.omega_v, p.gamma_beta(), p.kappa, p.epsilon);
    let gk = gb + k;
    let tail = 4.0 * v2 + gb * k;
    OrderEpsVariances {
        xa2: (eps > 0.0).then(|| 1.0 / (2.0 * eps) - 2.0 * v2 / (gb * k) + 2.0 * eps * v2 / (gb * k)),
        xb2: 0.5 + 2.0 * v2 / (gb * gk) - 2.0 * v2 * eps * tail / (gb * gb * k * gk),
        xc2: 0.5 + 2.0 * v2 / (k * gk) - 2.0 * v2 * eps * tail / (gb * k * k * gk),
        pa2: eps / 2.0 + 2.0 * eps * v2 / (gb * k),
        pb2: 0.5 - eps * 2.0 * v2 / (gb * gk),
        pc2: 0.5 - eps * 2.0 * v2 / (k * gk),
    }
}

/// Variance of the nuclear quadrature from the hybrid-mode variances.
pub fn hybrid_to_nuclear(var_alpha: f64, var_beta: f64, gamma_m: f64, gamma_f: f64) -> f64 {
    let s = gamma_m + gamma_f;
    gamma_m / s * var_alpha + gamma_f / s * var_beta
}

/// Raw helium inputs of the linearized six-quadrature drift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeliumDriftInputs {
    pub alpha_v: f64,
    pub alpha_t: f64,
    /// Metastable atoms.
    pub n: f64,
    /// Ground-state atoms.
    pub n_ground: f64,
    pub n_ph: f64,
    pub kappa: f64,
    pub gamma_m: f64,
    pub b_x: f64,
    pub gyro_nuc: f64,
    pub gyro_32: f64,
    pub delta_tilde: f64,
}

impl HeliumDriftInputs {
    /// Sets the cavity detuning and field to the tuning conditions.
    pub fn tuned(mut self) -> Self {
        self.delta_tilde = 1.5 * self.alpha_t * self.n;
        self.b_x = 2.0 * self.alpha_t * self.n_ph / self.gyro_32;
        self
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma_m * self.n / self.n_ground
    }
}

/// Drift matrix on (X_c, P_c, X_I, P_I, X, P).
pub fn three_mode_drift_matrix(h: &HeliumDriftInputs) -> [[f64; 6]; 6] {
    let wv = h.alpha_v * libm::sqrt(3.0 * h.n_ph * h.n) / 2.0;
    let wt = h.alpha_t * libm::sqrt(3.0 * h.n_ph * h.n);
    let det = h.delta_tilde - 1.5 * h.alpha_t * h.n;
    let ex = h.gamma_m * libm::sqrt(h.n / (3.0 * h.n_ground));
    let gf = h.gamma_f();
    let bn = h.b_x * h.gyro_nuc;
    let b32 = h.gyro_32 * h.b_x - 2.0 * h.alpha_t * h.n_ph;
    let k = h.kappa;
    let g3 = h.gamma_m / 3.0;
    [
        [-k, det, 0.0, 0.0, 0.0, wv],
        [-det, -k, 0.0, 0.0, -wt, 0.0],
        [0.0, 0.0, -gf, bn, ex, 0.0],
        [0.0, 0.0, -bn, -gf, 0.0, ex],
        [0.0, wv, ex, 0.0, -g3, b32],
        [-wt, 0.0, 0.0, ex, -b32, -g3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_stationary_for_atomic_variances() {
        let p = TwoModeParams::new(0.3, 0.2, 2.0, 0.1).unwrap();
        let d = two_mode_rhs(&TwoModeMoments::vacuum(), &p);
        assert_eq!(d.p2, 0.0);
        assert_eq!(d.x2, 0.0);
    }

    #[test]
    fn step_guard() {
        let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
        assert!(matches!(integrate_two_mode(&p, 1.0, 0.06), Err(Error::StepTooLarge { .. })));
        assert!(integrate_two_mode(&p, 1.0, 0.05).is_ok());
    }

    #[test]
    fn partial_last_step_reaches_t_end() {
        let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
        let tr = integrate_two_mode(&p, 1.03, 0.05).unwrap();
        assert_eq!(*tr.times.last().unwrap(), 1.03);
        assert_eq!(tr.len(), 22);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn adiabatic_endpoints() {
        for (e, g) in [(0.01, 0.0), (0.16, 0.0308), (0.0, 0.2), (1.0, 0.5)] {
            assert!((adiabatic_p_variance(0.0, e, g).unwrap() - 0.5).abs() < 1e-15);
        }
        assert_eq!(adiabatic_p_variance(1.0, 0.0, 0.0), Err(Error::DegenerateRate));
    }

    #[test]
    fn symmetric_point_has_no_squeezing() {
        let p = TwoModeParams::new(1.0, 1.0, 10.0, 0.0).unwrap();
        let l = deterministic_limits(&p).unwrap();
        assert_eq!((l.var_p, l.var_x), (0.5, 0.5));
        let p0 = TwoModeParams::new(1.0, 0.0, 10.0, 0.0).unwrap();
        assert_eq!(deterministic_limits(&p0), Err(Error::NonPositiveEpsilon));
    }

    #[test]
    fn nuclear_variance_limits() {
        assert_eq!(hybrid_to_nuclear(0.08, 0.5, 3.0, 0.0), 0.08);
        assert!((hybrid_to_nuclear(0.1, 0.5, 2.0, 2.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn frozen_without_coupling() {
        let p = ThreeModeParams::new(1.0, 0.5, 4.0, 0.0, 0.3).unwrap();
        let mut s = ThreeModeMoments::vacuum();
        s.x.xb2 = 0.9;
        s.x.xa2 = 0.7;
        s.p.pa2 = 0.2;
        let d = three_mode_rhs(&s, &p);
        assert_eq!(d.x.xa2, 0.0);
        assert_eq!(d.p.pa2, 0.0);
        assert!(d.x.xb2 < 0.0);
    }
}
