use alloc::vec::Vec;

pub(crate) fn rk4_step<const N: usize>(y: &[f64; N], h: f64, f: &impl Fn(&[f64; N]) -> [f64; N]) -> [f64; N] {
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &k1));
    let k3 = f(&axpy(y, 0.5 * h, &k2));
    let k4 = f(&axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Fixed-step RK4 from t = 0 to `t_end`. The last step is shortened when
/// `t_end` is not a multiple of `dt`. States are kept at t = 0, every
/// `record_every` steps, and at `t_end`.
pub(crate) fn integrate<const N: usize>(
    y0: [f64; N],
    t_end: f64,
    dt: f64,
    record_every: usize,
    f: impl Fn(&[f64; N]) -> [f64; N],
) -> (Vec<f64>, Vec<[f64; N]>) {
    let record_every = record_every.max(1);
    let full = libm::floor(t_end / dt) as usize;
    let rest = t_end - full as f64 * dt;
    // Treat a remainder below rounding noise as no partial step.
    let partial = rest > 1e-12 * dt.max(t_end);
    let steps = full + partial as usize;

    let mut times = Vec::with_capacity(steps / record_every + 2);
    let mut states = Vec::with_capacity(steps / record_every + 2);
    times.push(0.0);
    states.push(y0);

    let mut y = y0;
    for n in 1..=steps {
        let (h, t) = if n <= full { (dt, n as f64 * dt) } else { (rest, t_end) };
        y = rk4_step(&y, h, &f);
        if n % record_every == 0 || n == steps {
            times.push(t);
            states.push(y);
        }
    }
    (times, states)
}
