//! Homodyne-conditioned Gaussian trajectories and conditional statistics.
//!
//! Time is dimensionless, τ = Γt, and γ̃ = γ/Γ.

use alloc::vec::Vec;

use crate::moments::adiabatic_p_variance;
use crate::noise::NoiseStream;
use crate::params::ThreeModeParams;
use crate::{Error, Result};

/// Width parameter of the conditional wave packet, Var P = 1/(4u).
pub fn u_analytic(tau: f64, eps: f64, gamma_tilde: f64) -> f64 {
    let r = 2.0 * eps + gamma_tilde;
    if r < 1e-12 {
        return 0.5 + tau;
    }
    0.5 + (1.0 - eps) * (-libm::expm1(-r * tau)) / r
}

/// P-variance of the unconditioned state: ⟨P²⟩ with 1/2 when nothing decays.
pub fn unconditional_p_variance(tau: f64, eps: f64, gamma_tilde: f64) -> f64 {
    adiabatic_p_variance(tau, eps, gamma_tilde).unwrap_or(0.5)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTrajState {
    pub tau: f64,
    pub u: f64,
    pub pbar: f64,
    /// Running integral of p̄ dτ + dζ_s/2; σ = signal_integral / τ.
    pub signal_integral: f64,
}

impl GaussianTrajState {
    pub const fn initial() -> Self {
        GaussianTrajState { tau: 0.0, u: 0.5, pbar: 0.0, signal_integral: 0.0 }
    }

    pub fn sigma(&self) -> f64 {
        if self.tau > 0.0 {
            self.signal_integral / self.tau
        } else {
            0.0
        }
    }

    pub fn p_variance(&self) -> f64 {
        0.25 / self.u
    }
}

pub const MAX_DTAU: f64 = 1e-2;

/// One Euler-Maruyama step with given Wiener increments
/// (measurement `dz_s`, decoherence `dz_a`).
pub fn step_with_increments(
    s: &GaussianTrajState,
    eps: f64,
    gamma_tilde: f64,
    dtau: f64,
    dz_s: f64,
    dz_a: f64,
) -> Result<GaussianTrajState> {
    if !(dtau > 0.0) || dtau > MAX_DTAU {
        return Err(Error::StepTooLarge { dt: dtau, max_dt: MAX_DTAU });
    }
    if !(s.u >= 0.5 * (1.0 - 1e-9)) {
        return Err(Error::InvalidInput("trajectory width u fell below 1/2"));
    }
    let inv = 0.5 / s.u;
    let du = (1.0 - 2.0 * s.u * eps + gamma_tilde * (0.5 - s.u)) * dtau;
    let dp = -(eps + 0.5 * gamma_tilde) * s.pbar * dtau
        + dz_s * (inv - eps)
        + dz_a * libm::sqrt(0.5 * gamma_tilde) * (1.0 - inv);
    Ok(GaussianTrajState {
        tau: s.tau + dtau,
        u: s.u + du,
        pbar: s.pbar + dp,
        signal_integral: s.signal_integral + s.pbar * dtau + 0.5 * dz_s,
    })
}

pub fn step_trajectory(
    s: &GaussianTrajState,
    eps: f64,
    gamma_tilde: f64,
    dtau: f64,
    noise: &mut NoiseStream,
) -> Result<GaussianTrajState> {
    let (dz_s, dz_a) = noise.next_increments(dtau);
    step_with_increments(s, eps, gamma_tilde, dtau, dz_s, dz_a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub eps: f64,
    pub gamma_tilde: f64,
    pub n_traj: usize,
    pub tau_end: f64,
    pub dtau: f64,
    pub seed: u64,
    /// Keep every n-th step on the output grid (the end point is always kept).
    pub record_every: usize,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_traj < 1 {
            return Err(Error::InvalidInput("n_traj must be at least 1"));
        }
        if !(self.dtau > 0.0) || self.dtau > MAX_DTAU {
            return Err(Error::StepTooLarge { dt: self.dtau, max_dt: MAX_DTAU });
        }
        if !(self.tau_end >= 0.0) || !self.tau_end.is_finite() {
            return Err(Error::InvalidInput("tau_end must be finite and non-negative"));
        }
        if !(self.eps.is_finite() && self.gamma_tilde >= 0.0 && self.gamma_tilde.is_finite()) {
            return Err(Error::InvalidInput("eps must be finite and gamma_tilde non-negative"));
        }
        Ok(())
    }

    fn n_steps(&self) -> usize {
        libm::round(self.tau_end / self.dtau) as usize
    }

    fn recorded(&self, n: usize) -> bool {
        n % self.record_every.max(1) == 0 || n == self.n_steps()
    }

    /// Output grid, starting at τ = 0.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.n_steps()).filter(|&n| self.recorded(n)).map(|n| n as f64 * self.dtau).collect()
    }
}

/// One trajectory sampled on the ensemble grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub pbar: Vec<f64>,
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
}

/// Runs trajectory `index` of the ensemble described by `spec`.
pub fn simulate_trajectory(spec: &EnsembleSpec, index: u64) -> Result<TrajectoryRecord> {
    spec.validate()?;
    let n_steps = spec.n_steps();
    let mut noise = NoiseStream::new(spec.seed, index);
    let mut s = GaussianTrajState::initial();
    let cap = n_steps / spec.record_every.max(1) + 2;
    let mut rec = TrajectoryRecord { pbar: Vec::with_capacity(cap), sigma: Vec::with_capacity(cap), u: Vec::with_capacity(cap) };
    let push = |s: &GaussianTrajState, rec: &mut TrajectoryRecord| {
        rec.pbar.push(s.pbar);
        rec.sigma.push(s.sigma());
        rec.u.push(s.u);
    };
    push(&s, &mut rec);
    for n in 1..=n_steps {
        s = step_trajectory(&s, spec.eps, spec.gamma_tilde, spec.dtau, &mut noise)?;
        s.tau = n as f64 * spec.dtau;
        if spec.recorded(n) {
            push(&s, &mut rec);
        }
    }
    Ok(rec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub spec: EnsembleSpec,
    pub taus: Vec<f64>,
    /// Trajectories in index order.
    pub trajectories: Vec<TrajectoryRecord>,
}

impl Ensemble {
    pub fn from_records(spec: EnsembleSpec, trajectories: Vec<TrajectoryRecord>) -> Self {
        Ensemble { taus: spec.grid(), spec, trajectories }
    }

    /// Grid index of `tau`, if it lies on the grid.
    pub fn index_of(&self, tau: f64) -> Option<usize> {
        let tol = 1e-9 * self.spec.dtau.max(1.0);
        self.taus.iter().position(|&t| libm::fabs(t - tau) <= tol)
    }
}

/// Serial ensemble run.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Ensemble> {
    spec.validate()?;
    let trajectories = (0..spec.n_traj as u64)
        .map(|i| simulate_trajectory(spec, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble::from_records(*spec, trajectories))
}

/// Mean and standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if xs.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
    Estimate { value: mean, se: libm::sqrt(var / n) }
}

/// Summation in a fixed tree order, independent of scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn pbar_at(ens: &Ensemble, k: usize) -> Vec<f64> {
    ens.trajectories.iter().map(|t| t.pbar[k]).collect()
}

fn sigma_at(ens: &Ensemble, k: usize) -> Vec<f64> {
    ens.trajectories.iter().map(|t| t.sigma[k]).collect()
}

fn grid_index(ens: &Ensemble, tau: f64) -> Result<usize> {
    ens.index_of(tau).ok_or(Error::InvalidInput("tau is not on the ensemble grid"))
}

/// Ensemble mean of p̄ at grid time `tau`.
pub fn mean_pbar(ens: &Ensemble, tau: f64) -> Result<Estimate> {
    let k = grid_index(ens, tau)?;
    Ok(mean_se(&pbar_at(ens, k)))
}

/// ⟨p̄²⟩ + 1/(4u) at grid time `tau`, the unconditional ⟨P²⟩.
pub fn ensemble_p_variance(ens: &Ensemble, tau: f64) -> Result<Estimate> {
    let k = grid_index(ens, tau)?;
    let xs: Vec<f64> = ens.trajectories.iter().map(|t| t.pbar[k] * t.pbar[k] + 0.25 / t.u[k]).collect();
    Ok(mean_se(&xs))
}

/// Sample variance of p̄ with its jackknife standard error.
pub fn pbar_variance(ens: &Ensemble, tau: f64) -> Result<Estimate> {
    let k = grid_index(ens, tau)?;
    let xs = pbar_at(ens, k);
    let n = xs.len();
    if n < 3 {
        return Err(Error::InvalidInput("need at least 3 trajectories"));
    }
    let mean = pairwise_sum(&xs) / n as f64;
    let c: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let s1 = pairwise_sum(&c);
    let s2 = pairwise_sum(&c.iter().map(|x| x * x).collect::<Vec<_>>());
    let var = |s1: f64, s2: f64, m: f64| (s2 - s1 * s1 / m) / (m - 1.0);
    let full = var(s1, s2, n as f64);
    let loo: Vec<f64> = c.iter().map(|x| var(s1 - x, s2 - x * x, (n - 1) as f64)).collect();
    Ok(Estimate { value: full, se: jackknife_se(&loo) })
}

fn jackknife_se(loo: &[f64]) -> f64 {
    let n = loo.len() as f64;
    let mean = pairwise_sum(loo) / n;
    let ss = pairwise_sum(&loo.iter().map(|x| (x - mean) * (x - mean)).collect::<Vec<_>>());
    libm::sqrt((n - 1.0) / n * ss)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalStats {
    pub tau: f64,
    /// Conditional mean of P per unit signal.
    pub m: f64,
    /// Conditional variance.
    pub v: f64,
}

/// Small-x safe (x - (1 - e^{-x})) / x².
fn psi(x: f64) -> f64 {
    if x < 1e-3 {
        0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0
    } else {
        (x + libm::expm1(-x)) / (x * x)
    }
}

/// Ratio (1 - e^{-x}) / x.
fn zeta(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 - x / 2.0
    } else {
        -libm::expm1(-x) / x
    }
}

/// Signal variance ⟨σ²⟩ and signal-momentum covariance ⟨σ p̄⟩.
pub fn signal_moments(tau: f64, eps: f64, gamma_tilde: f64) -> (f64, f64) {
    let r = 2.0 * eps + gamma_tilde;
    let x = 0.5 * r * tau;
    let z = zeta(x);
    let cov = 0.5 * (1.0 - eps) * z * (1.0 - eps * tau * z);
    if r == 0.0 {
        return (0.5 + 0.25 / tau, cov);
    }
    let (a, b) = (eps / r, gamma_tilde / r);
    let var = b * psi(x) + 2.0 * a * b * z / tau + (1.0 - eps) * a * z * z + (a - 0.5 * b) * (a - 0.5 * b) / tau;
    (var, cov)
}

/// Closed-form conditional mean coefficient and variance at time τ > 0.
pub fn conditional_closed_form(tau: f64, eps: f64, gamma_tilde: f64) -> Result<ConditionalStats> {
    if !(tau > 0.0) {
        return Err(Error::InvalidInput("tau must be positive"));
    }
    let (var, cov) = signal_moments(tau, eps, gamma_tilde);
    let p2 = unconditional_p_variance(tau, eps, gamma_tilde);
    Ok(ConditionalStats { tau, m: cov / var, v: p2 - cov * cov / var })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McStats {
    pub tau: f64,
    pub m_hat: f64,
    pub v_hat: f64,
    pub se_m: f64,
    pub se_v: f64,
    pub n: usize,
}

// Least squares of y on x from centered sums; returns (slope, residual variance).
fn ols(n: f64, sx: f64, sy: f64, sxx: f64, sxy: f64, syy: f64) -> Option<(f64, f64)> {
    let cxx = sxx - sx * sx / n;
    if !(cxx / n >= 1e-15) {
        return None;
    }
    let cxy = sxy - sx * sy / n;
    let cyy = syy - sy * sy / n;
    let b = cxy / cxx;
    Some((b, (cyy - b * cxy) / (n - 2.0)))
}

/// Regression of p̄ on σ across trajectories at grid time τ, with
/// jackknife standard errors.
pub fn conditional_monte_carlo(ens: &Ensemble, tau: f64) -> Result<McStats> {
    let k = grid_index(ens, tau)?;
    let n = ens.trajectories.len();
    if n < 100 {
        return Err(Error::InvalidInput("conditional Monte Carlo needs at least 100 trajectories"));
    }
    let xs = sigma_at(ens, k);
    let ys = pbar_at(ens, k);
    let mx = pairwise_sum(&xs) / n as f64;
    let my = pairwise_sum(&ys) / n as f64;
    let x: Vec<f64> = xs.iter().map(|v| v - mx).collect();
    let y: Vec<f64> = ys.iter().map(|v| v - my).collect();
    let prod = |f: &dyn Fn(usize) -> f64| pairwise_sum(&(0..n).map(f).collect::<Vec<_>>());
    let sx = pairwise_sum(&x);
    let sy = pairwise_sum(&y);
    let sxx = prod(&|i| x[i] * x[i]);
    let sxy = prod(&|i| x[i] * y[i]);
    let syy = prod(&|i| y[i] * y[i]);
    let quarter_u = 0.25 / ens.trajectories[0].u[k];

    let nf = n as f64;
    let (b, res) = ols(nf, sx, sy, sxx, sxy, syy).ok_or(Error::DegenerateSignal)?;
    let mut loo_b = Vec::with_capacity(n);
    let mut loo_v = Vec::with_capacity(n);
    for i in 0..n {
        let (bi, ri) = ols(
            nf - 1.0,
            sx - x[i],
            sy - y[i],
            sxx - x[i] * x[i],
            sxy - x[i] * y[i],
            syy - y[i] * y[i],
        )
        .ok_or(Error::DegenerateSignal)?;
        loo_b.push(bi);
        loo_v.push(ri + quarter_u);
    }
    Ok(McStats {
        tau: ens.taus[k],
        m_hat: b,
        v_hat: res + quarter_u,
        se_m: jackknife_se(&loo_b),
        se_v: jackknife_se(&loo_v),
        n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QndPoint {
    pub tau: f64,
    pub m: f64,
    pub v: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QndOptimum {
    /// Small-ε expansion of the optimum.
    pub asymptotic: QndPoint,
    /// Maximum of m(τ) from the closed forms.
    pub numeric: QndPoint,
}

/// End of the quasi-QND window.
pub fn qnd_optimum(eps: f64, gamma_tilde: f64) -> Result<QndOptimum> {
    let s = eps + gamma_tilde / 6.0;
    if !(s > 0.0) {
        return Err(Error::InvalidInput("eps + gamma_tilde/6 must be positive"));
    }
    let rs = libm::sqrt(s);
    let asymptotic = QndPoint { tau: 1.0 / rs, m: 1.0 - rs, v: 0.25 * rs + gamma_tilde / 6.0 / rs };
    let m = |t: f64| conditional_closed_form(t, eps, gamma_tilde).map(|c| c.m).unwrap_or(f64::NEG_INFINITY);
    let tau = golden_max(m, 1e-2, 10.0 / rs, 1e-10);
    let c = conditional_closed_form(tau, eps, gamma_tilde)?;
    Ok(QndOptimum { asymptotic, numeric: QndPoint { tau, m: c.m, v: c.v } })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > rel_tol * (libm::fabs(a) + libm::fabs(b)) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeJumpStructure {
    pub gamma_alpha_rate: f64,
    pub gamma0: f64,
    pub description: &'static str,
}

/// Rates of the single nuclear-mode reduction. The identity jump of rate
/// Γ₀ drops out of the stochastic equations, so the two-mode machinery is
/// reused with Γ replaced by Γ_α.
pub fn he_jump_structure(p: &ThreeModeParams) -> HeJumpStructure {
    HeJumpStructure {
        gamma_alpha_rate: p.gamma_alpha_rate(),
        gamma0: p.gamma0(),
        description: "jumps: C = sqrt(Gamma_alpha)(P_alpha + i eps X_alpha) and C_d = 1 at rate Gamma0 (no effect on conditional state)",
    }
}

/// Physical duration (s) of the quasi-QND optimum for the nuclear mode.
pub fn t_qnd(p: &ThreeModeParams, gamma_tilde: f64) -> Result<f64> {
    let opt = qnd_optimum(p.epsilon, gamma_tilde)?;
    Ok(opt.asymptotic.tau / p.gamma_alpha_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_limits() {
        assert_eq!(u_analytic(0.0, 0.3, 0.1), 0.5);
        assert_eq!(u_analytic(2.0, 0.0, 0.0), 2.5);
        assert!((u_analytic(1e4, 0.01, 0.0) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn zero_noise_qnd_step() {
        let s = GaussianTrajState { tau: 1.0, u: 1.5, pbar: 0.3, signal_integral: 0.2 };
        let n = step_with_increments(&s, 0.0, 0.0, 1e-3, 0.0, 0.0).unwrap();
        assert_eq!(n.pbar, 0.3);
        assert!((n.u - 1.501).abs() < 1e-15);
        assert!(matches!(step_with_increments(&s, 0.0, 0.0, 0.02, 0.0, 0.0), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn no_information_at_start() {
        let c = conditional_closed_form(1e-9, 0.01, 0.001).unwrap();
        assert!(c.m < 1e-8);
        assert!((c.v - 0.5).abs() < 1e-8);
    }

    #[test]
    fn degenerate_signal() {
        let spec = EnsembleSpec { eps: 0.0, gamma_tilde: 0.0, n_traj: 100, tau_end: 0.01, dtau: 1e-3, seed: 1, record_every: 1 };
        let rec = TrajectoryRecord { pbar: alloc::vec![0.0; 11], sigma: alloc::vec![0.5; 11], u: alloc::vec![0.5; 11] };
        let ens = Ensemble::from_records(spec, alloc::vec![rec; 100]);
        assert_eq!(conditional_monte_carlo(&ens, 0.01), Err(Error::DegenerateSignal));
    }

    #[test]
    fn jump_structure_shares_rate() {
        let p = ThreeModeParams::new(3.92e6, 19.6, 6.3e8, 1.6e7, 0.16).unwrap();
        assert_eq!(he_jump_structure(&p).gamma_alpha_rate, p.gamma_alpha_rate());
        let p1 = ThreeModeParams { epsilon: 1.0, ..p };
        assert_eq!(he_jump_structure(&p1).gamma0, 0.0);
    }
}
