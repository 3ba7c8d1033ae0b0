//! Light-shift coupling constants from hyperfine structure.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result, TWO_PI};

/// Angular momentum stored as twice its value, so 5/2 is `5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: u32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: u32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(n: u32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseHalfIntError;

impl fmt::Display for ParseHalfIntError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected a non-negative integer or n/2")
    }
}

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    /// Accepts `"3"` or `"5/2"`. Decimal strings are rejected.
    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('/') {
            None => s
                .parse::<u32>()
                .ok()
                .and_then(|n| n.checked_mul(2))
                .map(HalfInt::from_twice)
                .ok_or(ParseHalfIntError),
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| ParseHalfIntError)?;
                match den.trim() {
                    "1" => num.checked_mul(2).map(HalfInt::from_twice).ok_or(ParseHalfIntError),
                    "2" => Ok(HalfInt::from_twice(num)),
                    _ => Err(ParseHalfIntError),
                }
            }
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// True when (a, b, c) can couple: |a-b| <= c <= a+b and a+b+c integer.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice as i64, b.twice as i64, c.twice as i64);
    (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

const FACT_MAX: usize = 30;

fn factorial(n: usize) -> i128 {
    const TABLE: [i128; FACT_MAX + 1] = {
        let mut t = [1i128; FACT_MAX + 1];
        let mut k = 1;
        while k <= FACT_MAX {
            t[k] = t[k - 1] * k as i128;
            k += 1;
        }
        t
    };
    TABLE[n]
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

// Arguments of the Racah formula as integers (all sums of twice-values are even).
fn tri_args(a: i64, b: i64, c: i64) -> [usize; 4] {
    [
        ((a + b - c) / 2) as usize,
        ((a - b + c) / 2) as usize,
        ((-a + b + c) / 2) as usize,
        ((a + b + c) / 2 + 1) as usize,
    ]
}

/// Wigner 6j symbol {a b c; d e g} by the Racah single sum.
///
/// Each term of the sum is `(t+1)` times a multinomial coefficient, so the
/// sum is accumulated exactly in `i128`; only the triangle prefactors and the
/// final product are in floating point. Returns 0 when a triangle fails.
pub fn wigner6j(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, e: HalfInt, g: HalfInt) -> f64 {
    if !(triangle(a, b, c) && triangle(a, e, g) && triangle(d, b, g) && triangle(d, e, c)) {
        return 0.0;
    }
    let [a, b, c, d, e, g] = [a, b, c, d, e, g].map(|x| x.twice as i64);
    let tris = [tri_args(a, b, c), tri_args(a, e, g), tri_args(d, b, g), tri_args(d, e, c)];

    let lo = [a + b + c, a + e + g, d + b + g, d + e + c].into_iter().max().unwrap() / 2;
    let hi = [a + b + d + e, a + c + d + g, b + c + e + g].into_iter().min().unwrap() / 2;
    let big = hi as usize + 1 > FACT_MAX || tris.iter().any(|t| t[3] > FACT_MAX);

    let mut delta = 1.0;
    if big {
        let mut ln = 0.0;
        for t in &tris {
            ln += ln_factorial(t[0]) + ln_factorial(t[1]) + ln_factorial(t[2]) - ln_factorial(t[3]);
        }
        delta = libm::exp(0.5 * ln);
    } else {
        for t in &tris {
            let num = factorial(t[0]) * factorial(t[1]) * factorial(t[2]);
            delta *= libm::sqrt(num as f64 / factorial(t[3]) as f64);
        }
    }

    if big {
        let mut sum = 0.0;
        for t in lo..=hi {
            let ks = racah_denoms(a, b, c, d, e, g, t);
            let mut ln = ln_factorial(t as usize + 1);
            for k in ks {
                ln -= ln_factorial(k);
            }
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * libm::exp(ln);
        }
        return delta * sum;
    }

    let mut sum: i128 = 0;
    for t in lo..=hi {
        // The seven denominators add up to t, so t!/prod(k!) is a multinomial.
        let ks = racah_denoms(a, b, c, d, e, g, t);
        let mut multinomial = factorial(t as usize);
        for k in ks {
            multinomial /= factorial(k);
        }
        let term = (t as i128 + 1) * multinomial;
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    delta * sum as f64
}

fn racah_denoms(a: i64, b: i64, c: i64, d: i64, e: i64, g: i64, t: i64) -> [usize; 7] {
    [
        (t - (a + b + c) / 2) as usize,
        (t - (a + e + g) / 2) as usize,
        (t - (d + b + g) / 2) as usize,
        (t - (d + e + c) / 2) as usize,
        ((a + b + d + e) / 2 - t) as usize,
        ((a + c + d + g) / 2 - t) as usize,
        ((b + c + e + g) / 2 - t) as usize,
    ]
}

/// Vector and tensor weights of one hyperfine transition f -> f'.
///
/// Returns `(w_v, w_t)`; both are zero when the transition is forbidden.
pub fn transition_weights(
    f: HalfInt,
    f_prime: HalfInt,
    j: HalfInt,
    j_prime: HalfInt,
    i: HalfInt,
) -> (f64, f64) {
    let (tf, tfp) = (f.twice as i64, f_prime.twice as i64);
    if tf == 0 || (tf - tfp).abs() > 2 || (tf - tfp) % 2 != 0 {
        return (0.0, 0.0);
    }
    let sixj = wigner6j(HalfInt::ONE, j, j_prime, i, f_prime, f);
    let pre = (2.0 * j_prime.value() + 1.0) * sixj * sixj;
    let fv = f.value();
    let (bv, bt) = match tfp - tf {
        -2 => (-(2.0 * fv - 1.0) / fv, 1.0 / fv),
        0 => {
            let x = -(2.0 * fv + 1.0) / (fv * (fv + 1.0));
            (x, x)
        }
        _ => ((2.0 * fv + 3.0) / (fv + 1.0), 1.0 / (fv + 1.0)),
    };
    (pre * bv, -pre * bt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExcitedLine {
    pub j_prime: HalfInt,
    pub f_prime: HalfInt,
    /// Position on the detuning axis, GHz.
    pub offset_ghz: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSpec {
    pub name: String,
    /// Nuclear spin.
    pub i: HalfInt,
    pub j: HalfInt,
    pub f: HalfInt,
    pub lambda_m: f64,
    /// Spontaneous emission rate, rad/s.
    pub gamma_sp: f64,
    pub lines: Vec<ExcitedLine>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingPair {
    pub alpha_v: f64,
    pub alpha_t: f64,
}

impl AtomSpec {
    /// Checks the level structure invariants.
    pub fn validate(&self) -> Result<()> {
        if !triangle(self.i, self.j, self.f) {
            return Err(Error::InvalidInput("triangle(i, j, f) fails"));
        }
        if self.lines.is_empty() {
            return Err(Error::InvalidInput("atom has no excited lines"));
        }
        for (k, line) in self.lines.iter().enumerate() {
            if (self.f.twice as i64 - line.f_prime.twice as i64).abs() > 2 {
                return Err(Error::InvalidInput("line violates |f - f'| <= 1"));
            }
            if !triangle(self.i, line.j_prime, line.f_prime) {
                return Err(Error::InvalidInput("triangle(i, j', f') fails"));
            }
            if !line.offset_ghz.is_finite() {
                return Err(Error::InvalidInput("line offset is not finite"));
            }
            if self.lines[..k].iter().any(|o| o.offset_ghz == line.offset_ghz) {
                return Err(Error::InvalidInput("duplicate line offset"));
            }
        }
        Ok(())
    }

    /// `(w_v, w_t)` for each line, in line order.
    pub fn weights(&self) -> Vec<(f64, f64)> {
        self.lines
            .iter()
            .map(|l| transition_weights(self.f, l.f_prime, self.j, l.j_prime, self.i))
            .collect()
    }

    // Sums of w / Delta (Delta in rad/s) without the Rabi factor.
    fn pole_sums(&self, detuning_ghz: f64) -> Result<(f64, f64, f64)> {
        let mut sv = 0.0;
        let mut st = 0.0;
        let mut sv_abs = 0.0;
        for line in &self.lines {
            let x = detuning_ghz - line.offset_ghz;
            if libm::fabs(x) <= 1e-6 {
                return Err(Error::OnResonance { offset_ghz: line.offset_ghz });
            }
            let delta = TWO_PI * 1e9 * x;
            let (wv, wt) = transition_weights(self.f, line.f_prime, self.j, line.j_prime, self.i);
            sv += wv / delta;
            st += wt / delta;
            sv_abs += libm::fabs(wv / delta);
        }
        Ok((sv, st, sv_abs))
    }
}

/// Coupling constants in rad/s for a given squared Rabi pulsation.
pub fn coupling_constants(atom: &AtomSpec, detuning_ghz: f64, rabi_sq: f64) -> Result<CouplingPair> {
    let (sv, st, _) = atom.pole_sums(detuning_ghz)?;
    Ok(CouplingPair { alpha_v: rabi_sq * sv, alpha_t: rabi_sq * st })
}

/// Tensor to vector ratio `(2f-1) alpha_t / alpha_v`.
pub fn epsilon_ratio(atom: &AtomSpec, detuning_ghz: f64) -> Result<f64> {
    let (sv, st, sv_abs) = atom.pole_sums(detuning_ghz)?;
    if libm::fabs(sv) <= 1e-15 * sv_abs {
        return Err(Error::VectorZero);
    }
    Ok((2.0 * atom.f.value() - 1.0) * st / sv)
}

/// Detuning (GHz) where the tensor coupling vanishes, to 1e-6 GHz.
pub fn find_tensor_zero(atom: &AtomSpec, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    if let Some(l) = atom.lines.iter().find(|l| l.offset_ghz >= lo && l.offset_ghz <= hi) {
        return Err(Error::PoleInBracket { offset_ghz: l.offset_ghz });
    }
    let at = |x: f64| coupling_constants(atom, x, 1.0).map(|c| c.alpha_t);
    let mut f_lo = at(lo)?;
    let f_hi = at(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoSignChange);
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        let f_mid = at(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub detuning_ghz: f64,
    /// `None` when a line falls within half a grid step of this point.
    pub values: Option<SweepValues>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepValues {
    pub alpha_v: f64,
    pub alpha_t: f64,
    /// `None` where the vector coupling vanishes.
    pub epsilon: Option<f64>,
}

/// Uniform detuning grid of couplings per unit squared Rabi pulsation.
pub fn detuning_sweep(atom: &AtomSpec, start_ghz: f64, end_ghz: f64, points: usize) -> Result<Vec<SweepRow>> {
    if points < 2 {
        return Err(Error::InvalidInput("sweep needs at least 2 points"));
    }
    let step = (end_ghz - start_ghz) / (points - 1) as f64;
    let half = 0.5 * libm::fabs(step);
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let m = (points - 1) as f64;
        // exact integer weights keep grid points like 3.275 free of drift
        let x = (start_ghz * (m - k as f64) + end_ghz * k as f64) / m;
        let near = atom.lines.iter().any(|l| libm::fabs(x - l.offset_ghz) < half);
        let values = if near {
            None
        } else {
            match coupling_constants(atom, x, 1.0) {
                Ok(c) => Some(SweepValues {
                    alpha_v: c.alpha_v,
                    alpha_t: c.alpha_t,
                    epsilon: epsilon_ratio(atom, x).ok(),
                }),
                Err(_) => None,
            }
        };
        rows.push(SweepRow { detuning_ghz: x, values });
    }
    Ok(rows)
}

pub mod builtin {
    //! Level data shipped with the library.

    use super::*;
    use alloc::vec;

    fn h(twice: u32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    /// 173Yb on the 556 nm intercombination line, offsets relative to
    /// 176Yb.
    pub fn yb173() -> AtomSpec {
        AtomSpec {
            name: "yb173".into(),
            i: h(5),
            j: h(0),
            f: h(5),
            lambda_m: 556.0e-9,
            gamma_sp: TWO_PI * 182.0e3,
            lines: vec![
                ExcitedLine { j_prime: h(2), f_prime: h(3), offset_ghz: 4.762926 },
                ExcitedLine { j_prime: h(2), f_prime: h(5), offset_ghz: 3.266557 },
                ExcitedLine { j_prime: h(2), f_prime: h(7), offset_ghz: -1.421392 },
            ],
        }
    }

    /// 3He metastable 2^3S_1, F = 3/2, on the 1083 nm line. Offsets are
    /// relative to C3.
    pub fn he3() -> AtomSpec {
        AtomSpec {
            name: "he3".into(),
            i: h(1),
            j: h(2),
            f: h(3),
            lambda_m: 1083.0e-9,
            gamma_sp: TWO_PI * 1.62e6,
            lines: vec![
                ExcitedLine { j_prime: h(4), f_prime: h(5), offset_ghz: 0.0 },
                ExcitedLine { j_prime: h(2), f_prime: h(3), offset_ghz: 1.7805 },
                ExcitedLine { j_prime: h(2), f_prime: h(1), offset_ghz: 6.2921 },
                ExcitedLine { j_prime: h(4), f_prime: h(3), offset_ghz: 6.9612 },
                ExcitedLine { j_prime: h(0), f_prime: h(1), offset_ghz: 34.385 },
            ],
        }
    }

    /// 87Sr on the 689 nm line. The offsets are placeholders (hyperfine
    /// splittings of 3P1 relative to F' = 11/2) and should be replaced by
    /// measured values from a data file.
    pub fn sr87() -> AtomSpec {
        AtomSpec {
            name: "sr87".into(),
            i: h(9),
            j: h(0),
            f: h(9),
            lambda_m: 689.0e-9,
            gamma_sp: TWO_PI * 7.5e3,
            lines: vec![
                ExcitedLine { j_prime: h(2), f_prime: h(7), offset_ghz: 2.6 },
                ExcitedLine { j_prime: h(2), f_prime: h(9), offset_ghz: 1.4 },
                ExcitedLine { j_prime: h(2), f_prime: h(11), offset_ghz: 0.0 },
            ],
        }
    }

    pub fn by_name(name: &str) -> Option<AtomSpec> {
        match name {
            "yb173" => Some(yb173()),
            "he3" => Some(he3()),
            "sr87" => Some(sr87()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 3] = ["yb173", "he3", "sr87"];
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn h(t: u32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn parses_fractions() {
        assert_eq!("5/2".parse::<HalfInt>().unwrap(), h(5));
        assert_eq!("3".parse::<HalfInt>().unwrap(), h(6));
        assert_eq!(" 4/2 ".parse::<HalfInt>().unwrap(), h(4));
        assert!("2.5".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(h(5).to_string(), "5/2");
    }

    #[test]
    fn broken_triangle_is_zero() {
        assert_eq!(wigner6j(h(2), h(2), h(4), h(1), h(1), h(1)), 0.0);
    }

    #[test]
    fn zero_argument_closed_form() {
        for (b, c, d) in [(1, 3, 2), (2, 2, 2), (5, 3, 2), (4, 6, 4), (3, 3, 0)] {
            let (b, c, d) = (h(b), h(c), h(d));
            if !triangle(d, b, c) {
                continue;
            }
            let got = wigner6j(HalfInt::ZERO, b, b, d, c, c);
            let phase = (b.twice() + c.twice() + d.twice()) / 2;
            let sign = if phase % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign / libm::sqrt((2.0 * b.value() + 1.0) * (2.0 * c.value() + 1.0));
            assert!((got - want).abs() < 1e-14, "{got} {want}");
        }
    }

    #[test]
    fn f_half_has_no_lower_branch() {
        let w = transition_weights(h(1), HalfInt::from_twice(0), h(0), h(2), h(1));
        assert_eq!(w, (0.0, 0.0));
    }

    #[test]
    fn large_arguments_use_log_path() {
        // {a a 0; a a 0} style values stay finite on the fallback path.
        let v = wigner6j(h(20), h(20), h(0), h(20), h(20), h(0));
        assert!((v.abs() - 1.0 / 21.0).abs() < 1e-12, "{v}");
    }
}
