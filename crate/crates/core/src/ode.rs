//! Adaptive Dormand-Prince 5(4) integrator on fixed-size real states.
//!
//! Complex systems are integrated by interleaving real and imaginary parts.
//! Integration runs forwards or backwards depending on the sign of
//! `t_end - t_start`.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step magnitude before giving up.
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_min: 1e-8, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("step size fell below {h_min:e} at t = {t}")]
    StepTooSmall { t: f64, h_min: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("integration stopped by monitor at t = {0}")]
    Stopped(f64),
}

/// What a post-step monitor wants the integrator to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monitor {
    Continue,
    /// The monitor rescaled or replaced the state in place.
    Modified,
    Stop,
}

#[derive(Clone, Copy, Debug)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (a, k) in terms {
        let s = a * h;
        for i in 0..N {
            out[i] += s * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, calling `monitor` after each
/// accepted step.
pub fn integrate<const N: usize, F, M>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
    mut monitor: M,
) -> Result<([f64; N], OdeStats), OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    M: FnMut(f64, &mut [f64; N]) -> Monitor,
{
    let mut stats = OdeStats { accepted: 0, rejected: 0, evals: 0 };
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evals += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, dir, opts, &mut stats).min(span.abs());
    let mut facold = 1e-4_f64;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
        let k3 = f(t + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = f(t + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = f(t + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = f(t + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let k7 = f(t + hs, &y_new);
        stats.evals += 6;

        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            stats.rejected += 1;
            if h < opts.h_min {
                return Err(OdeError::NonFinite(t));
            }
            continue;
        }

        if err <= 1.0 {
            // Lund-stabilised PI controller (Hairer's dopri5 defaults)
            let fac11 = err.max(1e-16).powf(0.17);
            let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.2, 10.0);
            facold = err.max(1e-4);
            stats.accepted += 1;
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            match monitor(t, &mut y) {
                Monitor::Continue => {}
                Monitor::Modified => {
                    k1 = f(t, &y);
                    stats.evals += 1;
                }
                Monitor::Stop => return Err(OdeError::Stopped(t)),
            }
            if last {
                return Ok((y, stats));
            }
            h = (h / fac).min(opts.h_max);
        } else {
            stats.rejected += 1;
            let fac11 = err.powf(0.2);
            h /= (fac11 / 0.9).min(10.0);
            if h < opts.h_min {
                return Err(OdeError::StepTooSmall { t, h_min: opts.h_min });
            }
        }
    }
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let norm = |v: &[f64; N]| (v.iter().enumerate().map(|(i, x)| (x / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, &[(1.0, f0)], dir * h0);
    let f1 = f(t + dir * h0, &y1);
    stats.evals += 1;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(opts.h_max)
}
