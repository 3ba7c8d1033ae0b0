//! Truncated-Fock Lindblad integrator, used as a reference for the Gaussian
//! moment equations.
//!
//! Operators are products of ladder operators. Each product is compiled to
//! its list of nonzero matrix elements, so applying it to ρ costs O(D) per
//! element instead of a dense O(D³) product.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::moments::{ThreeModeMoments, ThreeP, ThreeX, TwoModeMoments};
use crate::params::{ThreeModeParams, TwoModeParams};
use crate::{Error, Result};

pub type OperatorMatrix = DMatrix<Complex64>;

/// Dense density matrix, row-major in the product basis.
pub type DensityMatrix = DMatrix<Complex64>;

pub const MAX_TOTAL_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockDims {
    pub dim_atom: usize,
    pub dim_cavity: usize,
}

impl FockDims {
    pub fn new(dim_atom: usize, dim_cavity: usize) -> Result<Self> {
        let d = FockDims { dim_atom, dim_cavity };
        Space::new(&[dim_atom, dim_cavity])?;
        Ok(d)
    }

    pub fn total(&self) -> usize {
        self.dim_atom * self.dim_cavity
    }
}

/// Product of single-mode Fock spaces; mode 0 is the slowest index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Space {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDims);
        }
        let mut total: usize = 1;
        for &d in dims {
            total = total.checked_mul(d).ok_or(Error::InvalidDims)?;
        }
        if total > MAX_TOTAL_DIM {
            return Err(Error::InvalidDims);
        }
        let mut strides = vec![1; dims.len()];
        for m in (0..dims.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * dims[m + 1];
        }
        Ok(Space { dims: dims.to_vec(), strides, total })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ladder {
    mode: usize,
    dagger: bool,
}

/// Linear combination of ladder products, applied right to left.
#[derive(Clone, Debug, Default)]
pub struct Operator {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl Operator {
    pub fn identity() -> Self {
        Operator { terms: vec![(Complex64::new(1.0, 0.0), Vec::new())] }
    }

    pub fn annihilate(mode: usize) -> Self {
        Operator { terms: vec![(Complex64::new(1.0, 0.0), vec![Ladder { mode, dagger: false }])] }
    }

    pub fn create(mode: usize) -> Self {
        Operator { terms: vec![(Complex64::new(1.0, 0.0), vec![Ladder { mode, dagger: true }])] }
    }

    /// X = (a + a†)/√2
    pub fn x(mode: usize) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Operator::annihilate(mode).scale(Complex64::new(s, 0.0)).add(&Operator::create(mode).scale(Complex64::new(s, 0.0)))
    }

    /// P = (a - a†)/(i√2)
    pub fn p(mode: usize) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Operator::annihilate(mode).scale(Complex64::new(0.0, -s)).add(&Operator::create(mode).scale(Complex64::new(0.0, s)))
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    pub fn scale_re(self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(mut self, other: &Operator) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Operator) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, la) in &self.terms {
            for (cb, lb) in &other.terms {
                let mut l = la.clone();
                l.extend(lb.iter().copied());
                terms.push((ca * cb, l));
            }
        }
        Operator { terms }
    }

    /// Symmetrized product (AB + BA)/2.
    pub fn sym(a: &Operator, b: &Operator) -> Self {
        a.mul(b).add(&b.mul(a)).scale_re(0.5)
    }

    pub fn compile(&self, space: &Space) -> Compiled {
        let mut entries = Vec::new();
        for (c, ladders) in &self.terms {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..space.total {
                let mut idx = k;
                let mut amp = 1.0;
                let mut alive = true;
                for l in ladders.iter().rev() {
                    let n = space.level(idx, l.mode);
                    let st = space.strides[l.mode];
                    if l.dagger {
                        if n + 1 >= space.dims[l.mode] {
                            alive = false;
                            break;
                        }
                        amp *= libm::sqrt((n + 1) as f64);
                        idx += st;
                    } else {
                        if n == 0 {
                            alive = false;
                            break;
                        }
                        amp *= libm::sqrt(n as f64);
                        idx -= st;
                    }
                }
                if alive {
                    entries.push(Entry { from: k, to: idx, c: c * amp });
                }
            }
        }
        entries.sort_by_key(|e| (e.to, e.from));
        // merge duplicates
        let mut merged: Vec<Entry> = Vec::with_capacity(entries.len());
        for e in entries {
            match merged.last_mut() {
                Some(last) if last.to == e.to && last.from == e.from => last.c += e.c,
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.c.norm_sqr() != 0.0);
        Compiled { dim: space.total, entries: merged }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    from: usize,
    to: usize,
    c: Complex64,
}

/// Nonzero matrix elements O[to, from] of an operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Compiled {
    dim: usize,
    entries: Vec<Entry>,
}

impl Compiled {
    pub fn to_dense(&self) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(self.dim, self.dim);
        for e in &self.entries {
            m[(e.to, e.from)] += e.c;
        }
        m
    }

    /// tr(ρ O) for row-major ρ.
    fn trace_with(&self, rho: &[Complex64]) -> Complex64 {
        let d = self.dim;
        self.entries.iter().map(|e| e.c * rho[e.from * d + e.to]).sum()
    }

    /// out += O ρ (row operations).
    fn apply_left(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for e in &self.entries {
            let src = &rho[e.from * d..e.from * d + d];
            let dst = &mut out[e.to * d..e.to * d + d];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += e.c * s;
            }
        }
    }
}

/// Lindblad generator with single-mode annihilation jumps.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    space: Space,
    h: Compiled,
    jumps: Vec<(f64, usize)>,
    // number operators of the jump modes, as diagonals
    jump_n: Vec<Vec<f64>>,
    // for each jump, the lowered index and amplitude of each basis state
    jump_maps: Vec<Vec<Option<(usize, f64)>>>,
}

impl Lindbladian {
    /// `jumps` are (rate, mode) pairs for sqrt(rate)·a_mode.
    pub fn new(space: Space, h: &Operator, jumps: &[(f64, usize)]) -> Self {
        let hc = h.compile(&space);
        let mut jump_n = Vec::new();
        let mut jump_maps = Vec::new();
        for &(_, mode) in jumps {
            let n: Vec<f64> = (0..space.total).map(|i| space.level(i, mode) as f64).collect();
            // a|k> = sqrt(n_k)|k - e>, so row i of a holds column i + e.
            let map = (0..space.total)
                .map(|i| {
                    let n = space.level(i, mode);
                    (n + 1 < space.dims[mode]).then(|| (i + space.strides[mode], libm::sqrt((n + 1) as f64)))
                })
                .collect();
            jump_n.push(n);
            jump_maps.push(map);
        }
        Lindbladian { space, h: hc, jumps: jumps.to_vec(), jump_n, jump_maps }
    }

    pub fn dim(&self) -> usize {
        self.space.total
    }

    /// out = L(ρ). `scratch` must have length D².
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let d = self.space.total;
        scratch.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        self.h.apply_left(rho, scratch);
        // -i[H, ρ] = -i(Hρ - (Hρ)†)
        for i in 0..d {
            for j in 0..d {
                let a = scratch[i * d + j];
                let b = scratch[j * d + i].conj();
                let diff = a - b;
                out[i * d + j] = Complex64::new(diff.im, -diff.re);
            }
        }
        for ((&(rate, _), n), map) in self.jumps.iter().zip(&self.jump_n).zip(&self.jump_maps) {
            if rate == 0.0 {
                continue;
            }
            for i in 0..d {
                let (ki, ai) = match map[i] {
                    Some(v) => (Some(v.0), v.1),
                    None => (None, 0.0),
                };
                for j in 0..d {
                    let mut v = -0.5 * rate * (n[i] + n[j]) * rho[i * d + j];
                    if let (Some(ki), Some((kj, aj))) = (ki, map[j]) {
                        v += rate * ai * aj * rho[ki * d + kj];
                    }
                    out[i * d + j] += v;
                }
            }
        }
    }

    /// Population summed over basis states whose `mode` sits on its top level.
    pub fn top_population(&self, rho: &[Complex64], mode: usize) -> f64 {
        let d = self.space.total;
        let top = self.space.dims[mode] - 1;
        (0..d).filter(|&i| self.space.level(i, mode) == top).map(|i| rho[i * d + i].re).sum()
    }
}

/// Vacuum of every mode.
pub fn vacuum(space: &Space) -> Vec<Complex64> {
    let d = space.total;
    let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
    rho[0] = Complex64::new(1.0, 0.0);
    rho
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub record_every: usize,
    /// Largest allowed population of either top Fock level.
    pub leak_tolerance: f64,
    /// Run a Hermitian eigen decomposition at each recorded step.
    pub check_positivity: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { record_every: 1, leak_tolerance: 1e-6, check_positivity: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct OracleDiagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity: f64,
    /// Smallest eigenvalue seen (0 when positivity checks were off).
    pub min_eigenvalue: f64,
    pub max_top_population: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRun<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub diagnostics: OracleDiagnostics,
}

struct Rk4Buffers {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Rk4Buffers {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Rk4Buffers { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z.clone(), scratch: z }
    }
}

fn rk4_step(l: &Lindbladian, rho: &mut [Complex64], h: f64, b: &mut Rk4Buffers) {
    let Rk4Buffers { k, tmp, scratch } = b;
    let [k1, k2, k3, k4] = k;
    l.apply(rho, k1, scratch);
    for ((t, r), x) in tmp.iter_mut().zip(rho.iter()).zip(k1.iter()) {
        *t = r + x * (0.5 * h);
    }
    l.apply(tmp, k2, scratch);
    for ((t, r), x) in tmp.iter_mut().zip(rho.iter()).zip(k2.iter()) {
        *t = r + x * (0.5 * h);
    }
    l.apply(tmp, k3, scratch);
    for ((t, r), x) in tmp.iter_mut().zip(rho.iter()).zip(k3.iter()) {
        *t = r + x * h;
    }
    l.apply(tmp, k4, scratch);
    let w = h / 6.0;
    for i in 0..rho.len() {
        rho[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * w;
    }
}

fn hermiticity(rho: &[Complex64], d: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            m = m.max((rho[i * d + j] - rho[j * d + i].conj()).norm());
        }
    }
    m
}

fn min_eigenvalue(rho: &[Complex64], d: usize) -> f64 {
    let m = DMatrix::from_row_slice(d, d, rho);
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_dt(dt: f64, t_end: f64, max_rate: f64) -> Result<()> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput("t_end must be finite and non-negative"));
    }
    let max_dt = if max_rate > 0.0 { 0.02 / max_rate } else { f64::INFINITY };
    if !(dt > 0.0) || dt > max_dt {
        return Err(Error::StepTooLarge { dt, max_dt });
    }
    Ok(())
}

/// Integrates ρ from the vacuum and records `measure(ρ)` along the way.
fn run<S>(
    l: &Lindbladian,
    t_end: f64,
    dt: f64,
    opts: &OracleOptions,
    measure: impl Fn(&[Complex64]) -> S,
) -> Result<OracleRun<S>> {
    let d = l.dim();
    let mut rho = vacuum(&l.space);
    let mut buf = Rk4Buffers::new(d * d);
    let full = libm::floor(t_end / dt) as usize;
    let rest = t_end - full as f64 * dt;
    let partial = rest > 1e-12 * dt.max(t_end);
    let steps = full + partial as usize;
    let every = opts.record_every.max(1);
    let modes = l.space.dims.len();

    let mut diag = OracleDiagnostics { min_eigenvalue: if opts.check_positivity { 1.0 } else { 0.0 }, ..Default::default() };
    let mut times = vec![0.0];
    let mut states = vec![measure(&rho)];

    for n in 1..=steps {
        let (h, t) = if n <= full { (dt, n as f64 * dt) } else { (rest, t_end) };
        rk4_step(l, &mut rho, h, &mut buf);
        for m in 0..modes {
            let pop = l.top_population(&rho, m);
            diag.max_top_population = diag.max_top_population.max(pop);
            if pop > opts.leak_tolerance {
                return Err(Error::TruncationLeak { time: t, population: pop });
            }
        }
        if n % every == 0 || n == steps {
            let tr: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
            diag.max_trace_drift = diag.max_trace_drift.max(libm::fabs(tr - 1.0));
            diag.max_hermiticity = diag.max_hermiticity.max(hermiticity(&rho, d));
            if opts.check_positivity {
                diag.min_eigenvalue = diag.min_eigenvalue.min(min_eigenvalue(&rho, d));
            }
            times.push(t);
            states.push(measure(&rho));
        }
    }
    Ok(OracleRun { times, states, diagnostics: diag })
}

/// Operators of the two-mode problem (atom = mode 0, cavity = mode 1).
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub a: OperatorMatrix,
    pub c: OperatorMatrix,
    pub x: OperatorMatrix,
    pub p: OperatorMatrix,
    pub xc: OperatorMatrix,
    pub pc: OperatorMatrix,
    pub h: OperatorMatrix,
    /// sqrt(κ) c and sqrt(γ) a.
    pub jumps: Vec<OperatorMatrix>,
}

fn two_mode_hamiltonian(p: &TwoModeParams) -> Operator {
    Operator::p(0)
        .mul(&Operator::p(1))
        .add(&Operator::x(0).mul(&Operator::x(1)).scale_re(p.epsilon))
        .scale_re(p.omega_v)
}

pub fn build_operators(d: FockDims, p: &TwoModeParams) -> Result<OperatorSet> {
    let space = Space::new(&[d.dim_atom, d.dim_cavity])?;
    let dense = |o: Operator| o.compile(&space).to_dense();
    Ok(OperatorSet {
        a: dense(Operator::annihilate(0)),
        c: dense(Operator::annihilate(1)),
        x: dense(Operator::x(0)),
        p: dense(Operator::p(0)),
        xc: dense(Operator::x(1)),
        pc: dense(Operator::p(1)),
        h: dense(two_mode_hamiltonian(p)),
        jumps: vec![
            dense(Operator::annihilate(1).scale_re(libm::sqrt(p.kappa))),
            dense(Operator::annihilate(0).scale_re(libm::sqrt(p.gamma))),
        ],
    })
}

/// Re tr(ρ O). Also returns the imaginary part, which should vanish for
/// Hermitian `op`.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<(f64, f64)> {
    if rho.shape() != op.shape() || rho.nrows() != rho.ncols() {
        return Err(Error::DimMismatch);
    }
    let d = rho.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += rho[(i, j)] * op[(j, i)];
        }
    }
    Ok((s.re, s.im))
}

fn two_mode_observables(space: &Space) -> [Compiled; 6] {
    let (x, p, xc, pc) = (Operator::x(0), Operator::p(0), Operator::x(1), Operator::p(1));
    [
        p.mul(&p).compile(space),
        Operator::sym(&p, &xc).compile(space),
        xc.mul(&xc).compile(space),
        x.mul(&x).compile(space),
        Operator::sym(&x, &pc).compile(space),
        pc.mul(&pc).compile(space),
    ]
}

/// Two-mode master equation from the vacuum; records the six Gaussian moments.
pub fn integrate_master(d: FockDims, p: &TwoModeParams, t_end: f64, dt: f64) -> Result<OracleRun<TwoModeMoments>> {
    integrate_master_with(d, p, t_end, dt, &OracleOptions::default())
}

pub fn integrate_master_with(
    d: FockDims,
    p: &TwoModeParams,
    t_end: f64,
    dt: f64,
    opts: &OracleOptions,
) -> Result<OracleRun<TwoModeMoments>> {
    p.validate()?;
    check_dt(dt, t_end, p.max_rate())?;
    let space = Space::new(&[d.dim_atom, d.dim_cavity])?;
    let l = Lindbladian::new(space.clone(), &two_mode_hamiltonian(p), &[(p.kappa, 1), (p.gamma, 0)]);
    let obs = two_mode_observables(&space);
    run(&l, t_end, dt, opts, |rho| {
        let v: [f64; 6] = core::array::from_fn(|k| obs[k].trace_with(rho).re);
        TwoModeMoments::from_array(v)
    })
}

/// Fock dimensions of the three-mode oracle (alpha, beta, cavity).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThreeFockDims {
    pub dim_alpha: usize,
    pub dim_beta: usize,
    pub dim_cavity: usize,
}

/// Hybrid-basis three-mode master equation from the vacuum.
pub fn integrate_master_three(
    d: ThreeFockDims,
    p: &ThreeModeParams,
    t_end: f64,
    dt: f64,
    opts: &OracleOptions,
) -> Result<OracleRun<ThreeModeMoments>> {
    p.validate()?;
    check_dt(dt, t_end, p.max_rate())?;
    if [d.dim_alpha, d.dim_beta, d.dim_cavity].iter().any(|&x| x > 8) {
        return Err(Error::InvalidDims);
    }
    let space = Space::new(&[d.dim_alpha, d.dim_beta, d.dim_cavity])?;
    let (xa, pa, xb, pb, xc, pc) =
        (Operator::x(0), Operator::p(0), Operator::x(1), Operator::p(1), Operator::x(2), Operator::p(2));
    let h = pa
        .clone()
        .scale_re(p.omega_valpha())
        .add(&pb.clone().scale_re(p.omega_vbeta()))
        .mul(&pc)
        .add(&xa.clone().scale_re(p.omega_talpha()).add(&xb.clone().scale_re(p.omega_tbeta())).mul(&xc));
    let l = Lindbladian::new(space.clone(), &h, &[(p.kappa, 2), (p.gamma_beta(), 1)]);
    let obs: [Compiled; 12] = [
        xa.mul(&xa),
        xb.mul(&xb),
        Operator::sym(&xa, &pc),
        Operator::sym(&xb, &pc),
        Operator::sym(&xa, &xb),
        pc.mul(&pc),
        pa.mul(&pa),
        pb.mul(&pb),
        Operator::sym(&pa, &xc),
        Operator::sym(&pb, &xc),
        Operator::sym(&pa, &pb),
        xc.mul(&xc),
    ]
    .map(|o| o.compile(&space));
    run(&l, t_end, dt, opts, |rho| {
        let v: [f64; 12] = core::array::from_fn(|k| obs[k].trace_with(rho).re);
        let mut x = [0.0; 6];
        let mut q = [0.0; 6];
        x.copy_from_slice(&v[..6]);
        q.copy_from_slice(&v[6..]);
        ThreeModeMoments { x: ThreeX::from_array(x), p: ThreeP::from_array(q) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dims_guard() {
        assert_eq!(FockDims::new(1, 4), Err(Error::InvalidDims));
        assert_eq!(FockDims::new(65, 64), Err(Error::InvalidDims));
        assert!(FockDims::new(64, 64).is_ok());
    }

    #[test]
    fn commutator_except_top_block() {
        let d = FockDims::new(5, 3).unwrap();
        let p = TwoModeParams::new(0.1, 0.3, 1.0, 0.0).unwrap();
        let ops = build_operators(d, &p).unwrap();
        let comm = &ops.x * &ops.p - &ops.p * &ops.x;
        for i in 0..15 {
            for j in 0..15 {
                let atom_top = i / 3 == 4;
                let want = if i == j && !atom_top { c(0.0, 1.0) } else if i == j { c(0.0, -4.0) } else { c(0.0, 0.0) };
                assert!((comm[(i, j)] - want).norm() < 1e-14, "{i} {j} {}", comm[(i, j)]);
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let d = FockDims::new(6, 4).unwrap();
        let p = TwoModeParams::new(0.7, 0.3, 1.0, 0.0).unwrap();
        let h = build_operators(d, &p).unwrap().h;
        assert!((&h - h.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn vacuum_expectations() {
        let d = FockDims::new(6, 4).unwrap();
        let p = TwoModeParams::new(0.7, 0.3, 1.0, 0.0).unwrap();
        let ops = build_operators(d, &p).unwrap();
        let mut rho = DensityMatrix::zeros(24, 24);
        rho[(0, 0)] = c(1.0, 0.0);
        let x2 = &ops.x * &ops.x;
        let p2 = &ops.p * &ops.p;
        assert!((expectation(&rho, &x2).unwrap().0 - 0.5).abs() < 1e-15);
        assert!((expectation(&rho, &p2).unwrap().0 - 0.5).abs() < 1e-15);
        assert_eq!(expectation(&rho, &ops.x).unwrap().0, 0.0);
        let id = OperatorMatrix::identity(24, 24);
        assert_eq!(expectation(&rho, &id).unwrap().0, 1.0);
        assert_eq!(expectation(&rho, &OperatorMatrix::identity(3, 3)), Err(Error::DimMismatch));
    }

    // Dense reference: -i[H,ρ] + Σ (LρL† - {L†L, ρ}/2)
    fn dense_lindblad(h: &OperatorMatrix, jumps: &[OperatorMatrix], rho: &OperatorMatrix) -> OperatorMatrix {
        let mi = c(0.0, -1.0);
        let mut out = (h * rho - rho * h) * mi;
        for l in jumps {
            let ld = l.adjoint();
            let ldl = &ld * l;
            out += l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5, 0.0);
        }
        out
    }

    #[test]
    fn structured_generator_matches_dense() {
        let d = FockDims::new(4, 3).unwrap();
        let p = TwoModeParams::new(0.6, 0.35, 1.3, 0.2).unwrap();
        let ops = build_operators(d, &p).unwrap();
        let n = 12;
        // Hermitian test matrix with unequal entries
        let mut rho = OperatorMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = c(((i * 7 + j * 3) % 11) as f64 * 0.1, ((i * 5 + j * 2) % 7) as f64 * 0.05);
                rho[(i, j)] += v;
                rho[(j, i)] += v.conj();
            }
        }
        let want = dense_lindblad(&ops.h, &ops.jumps, &rho);
        let space = Space::new(&[4, 3]).unwrap();
        let l = Lindbladian::new(space, &two_mode_hamiltonian(&p), &[(p.kappa, 1), (p.gamma, 0)]);
        let flat: Vec<Complex64> = (0..n * n).map(|k| rho[(k / n, k % n)]).collect();
        let mut out = vec![c(0.0, 0.0); n * n];
        let mut scratch = out.clone();
        l.apply(&flat, &mut out, &mut scratch);
        for k in 0..n * n {
            assert!((out[k] - want[(k / n, k % n)]).norm() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_stays_vacuum() {
        let d = FockDims::new(4, 4).unwrap();
        let p = TwoModeParams::new(0.0, 0.3, 1.0, 0.1).unwrap();
        let run = integrate_master(d, &p, 2.0, 0.02).unwrap();
        for s in &run.states {
            for (v, want) in s.to_array().iter().zip(TwoModeMoments::vacuum().to_array()) {
                assert!((v - want).abs() < 1e-14);
            }
        }
    }
}
