//! Planes in C^4, the chart-induced matrix Riccati flow of the spectral
//! problem, the Riccati-Evans function and a direct linear-flow oracle.

use crate::error::{Error, Result};
use crate::linalg::{c, cond2, det2, inv2, lower, qr42, stack, upper, Mat2, Mat4, Mat42, C64, I};
use crate::linearization::{slow_coeff_from_state, stable_frame_plus, unstable_frame_minus};
use crate::model::ModelParams;
use crate::ode::{integrate, Monitor, OdeError, OdeOptions};
use crate::wave::{WaveProfile, WaveType};

/// Charts whose upper block is worse conditioned than this are refused.
pub const CHART_COND_LIMIT: f64 = 1e10;

#[derive(Clone, Debug)]
pub struct Chart {
    pub t: Mat4,
    t_inv: Mat4,
    pub label: String,
}

impl Chart {
    pub fn new(t: Mat4, label: impl Into<String>) -> Result<Self> {
        let t_inv = t.try_inverse().ok_or_else(|| Error::InvalidParams("chart matrix is singular".into()))?;
        Ok(Self { t, t_inv, label: label.into() })
    }

    pub fn identity() -> Self {
        Self { t: Mat4::identity(), t_inv: Mat4::identity(), label: "identity".into() }
    }

    pub fn t_inv(&self) -> &Mat4 {
        &self.t_inv
    }

    pub fn det(&self) -> C64 {
        self.t.determinant()
    }
}

/// The chart used for all production runs; `det T = 1`.
pub fn default_chart() -> Chart {
    let z = c(0.0);
    let t = Mat4::new(
        -I, z, c(1.0), z,
        z, I, z, c(1.0),
        z, z, I, z,
        z, z, z, -I,
    );
    Chart::new(t, "triangular").expect("triangular with unit-modulus diagonal")
}

/// Homogeneous coordinates `(K12, K13, K14, K23, K24, K34)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PluckerPoint(pub [C64; 6]);

impl PluckerPoint {
    /// `|K12 K34 - K13 K24 + K14 K23|` relative to the squared norm.
    pub fn relation_residual(&self) -> f64 {
        let k = &self.0;
        let r = k[0] * k[5] - k[1] * k[4] + k[2] * k[3];
        let n2: f64 = k.iter().map(|z| z.norm_sqr()).sum();
        r.norm() / n2
    }

    /// Projective equality up to a nonzero scalar, within `tol`.
    pub fn proportional(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (&self.0, &other.0);
        let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (0..6).all(|i| (i..6).all(|j| (a[i] * b[j] - a[j] * b[i]).norm() <= tol * na * nb))
    }
}

fn is_rank_two(f: &Mat42) -> bool {
    let sv = f.svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    smax > 0.0 && smin > 1e-12 * smax
}

pub fn plucker_embed(f: &Mat42) -> Result<PluckerPoint> {
    if !is_rank_two(f) {
        return Err(Error::DegenerateFrame);
    }
    let k = |i: usize, j: usize| f[(i, 0)] * f[(j, 1)] - f[(j, 0)] * f[(i, 1)];
    Ok(PluckerPoint([k(0, 1), k(0, 2), k(0, 3), k(1, 2), k(1, 3), k(2, 3)]))
}

/// Chart coordinate `W = Y_T X_T^{-1}` of the plane spanned by `f`.
pub fn frame_to_chart(f: &Mat42, chart: &Chart) -> Result<Mat2> {
    let tf = chart.t * f;
    let x = upper(&tf);
    let cond = cond2(&x);
    if !(cond < CHART_COND_LIMIT) {
        return Err(Error::NotInChart { cond });
    }
    let xi = inv2(&x).ok_or(Error::NotInChart { cond: f64::INFINITY })?;
    Ok(lower(&tf) * xi)
}

/// A frame `T^{-1} [I; W]` of the plane with chart coordinate `W`.
pub fn chart_to_frame(w: &Mat2, chart: &Chart) -> Mat42 {
    chart.t_inv * stack(&Mat2::identity(), w)
}

/// Right-hand side `C + D W - W A - W B W` for the blocks
/// `[[A, B], [C, D]]` of a conjugated coefficient matrix.
pub fn riccati_rhs(w: &Mat2, a: &Mat2, b: &Mat2, cc: &Mat2, d: &Mat2) -> Mat2 {
    cc + d * w - w * a - w * b * w
}

#[inline]
fn riccati_field(m: &Mat4, w: &Mat2) -> Mat2 {
    let a = m.fixed_view::<2, 2>(0, 0);
    let b = m.fixed_view::<2, 2>(0, 2);
    let cc = m.fixed_view::<2, 2>(2, 0);
    let d = m.fixed_view::<2, 2>(2, 2);
    cc + d * w - w * a - w * (b * w)
}

/// `T A(z; lambda) T^{-1}` assembled from precomputed pieces: `A` is affine
/// in `w`, `u w`, `u^2` and `v`.
#[derive(Clone, Debug)]
pub struct ConjugatedCoefficients {
    m0: Mat4,
    mw: Mat4,
    muw: Mat4,
    mu2: Mat4,
    mv: Mat4,
}

impl ConjugatedCoefficients {
    pub fn new(lambda: C64, p: &ModelParams, chart: &Chart) -> Self {
        let conj = |m: Mat4| chart.t * m * chart.t_inv;
        let base = slow_coeff_from_state(&[0.0, 0.0, 0.0, 0.0], lambda, p);
        let part = |x: [f64; 4]| slow_coeff_from_state(&x, lambda, p) - base;
        let mw = part([0.0, 0.0, 0.0, 1.0]);
        // u = 1, w = 1 carries w, uw and u^2; remove the w and u^2 parts
        let mu2 = part([1.0, 0.0, 0.0, 0.0]);
        let muw = part([1.0, 0.0, 0.0, 1.0]) - mw - mu2;
        let mv = part([0.0, 0.0, 1.0, 0.0]);
        Self { m0: conj(base), mw: conj(mw), muw: conj(muw), mu2: conj(mu2), mv: conj(mv) }
    }

    #[inline]
    pub fn at(&self, x: &[f64; 4]) -> Mat4 {
        let [u, _, v, w] = *x;
        self.m0 + self.mw * c(w) + self.muw * c(u * w) + self.mu2 * c(u * u) + self.mv * c(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvansOptions {
    pub ode: OdeOptions,
    /// `|W|` above which the chart is declared singular.
    pub blowup: f64,
    /// Length of frozen-coefficient flow applied to the asymptotic frames
    /// before integrating along the wave.
    pub relaxation: f64,
}

impl Default for EvansOptions {
    fn default() -> Self {
        Self { ode: OdeOptions::default(), blowup: 1e8, relaxation: 10.0 }
    }
}

fn pack2(w: &Mat2) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (k, z) in w.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    out
}

fn unpack2(x: &[f64; 8]) -> Mat2 {
    Mat2::from_fn(|i, j| {
        let k = i + 2 * j;
        C64::new(x[2 * k], x[2 * k + 1])
    })
}

fn pack42(f: &Mat42) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (k, z) in f.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    out
}

fn unpack42(x: &[f64; 16]) -> Mat42 {
    Mat42::from_fn(|i, j| {
        let k = i + 4 * j;
        C64::new(x[2 * k], x[2 * k + 1])
    })
}

fn map_ode(e: OdeError) -> Error {
    match e {
        OdeError::Stopped(z) => Error::ChartSingularity { z },
        other => Error::Integration(other),
    }
}

/// Riccati flow driven by an arbitrary conjugated coefficient field.
pub fn integrate_riccati_field<F>(w0: &Mat2, z_start: f64, z_end: f64, field: F, opts: &EvansOptions) -> Result<Mat2>
where
    F: Fn(f64) -> Mat4,
{
    let blowup = opts.blowup;
    let (y, _) = integrate(
        |z, x: &[f64; 8]| pack2(&riccati_field(&field(z), &unpack2(x))),
        z_start,
        z_end,
        pack2(w0),
        &opts.ode,
        |_, x| if x.iter().any(|v| v.abs() > blowup) { Monitor::Stop } else { Monitor::Continue },
    )
    .map_err(map_ode)?;
    Ok(unpack2(&y))
}

/// Riccati flow together with `ln det X` of the frame it represents:
/// `X' = (A + B W) X`, so the log determinant grows by `tr(A + B W)`.
/// Returns the final `W` and the change in `ln det X`, which is
/// independent of how the initial frame was normalised.
pub fn integrate_riccati_traced<F>(
    w0: &Mat2,
    z_start: f64,
    z_end: f64,
    field: F,
    opts: &EvansOptions,
) -> Result<(Mat2, C64)>
where
    F: Fn(f64) -> Mat4,
{
    let blowup = opts.blowup;
    let mut x0 = [0.0; 10];
    x0[..8].copy_from_slice(&pack2(w0));
    let (y, _) = integrate(
        |z, x: &[f64; 10]| {
            let m = field(z);
            let w = unpack2(x[..8].try_into().expect("8 entries"));
            let tr = (m.fixed_view::<2, 2>(0, 0) + m.fixed_view::<2, 2>(0, 2) * w).trace();
            let mut out = [0.0; 10];
            out[..8].copy_from_slice(&pack2(&riccati_field(&m, &w)));
            out[8] = tr.re;
            out[9] = tr.im;
            out
        },
        z_start,
        z_end,
        x0,
        &opts.ode,
        |_, x| if x[..8].iter().any(|v| v.abs() > blowup) { Monitor::Stop } else { Monitor::Continue },
    )
    .map_err(map_ode)?;
    Ok((unpack2(y[..8].try_into().expect("8 entries")), C64::new(y[8], y[9])))
}

fn check_span(wave: &WaveProfile, zs: &[f64]) -> Result<()> {
    for &z in zs {
        if !(z >= wave.z_min() && z <= wave.z_max()) {
            return Err(Error::OutOfDomain { z, lo: wave.z_min(), hi: wave.z_max() });
        }
    }
    Ok(())
}

/// Chart Riccati flow along the wave between two points of its grid.
pub fn integrate_riccati(
    w0: &Mat2,
    z_start: f64,
    z_end: f64,
    lambda: C64,
    wave: &WaveProfile,
    chart: &Chart,
    opts: &EvansOptions,
) -> Result<Mat2> {
    check_span(wave, &[z_start, z_end])?;
    let coeff = ConjugatedCoefficients::new(lambda, &wave.params, chart);
    integrate_riccati_field(w0, z_start, z_end, |z| coeff.at(&wave.eval_array(z)), opts)
}

#[derive(Clone, Copy, Debug)]
pub struct EvansDetail {
    pub value: C64,
    pub w_u: Mat2,
    pub w_s: Mat2,
    /// Change of `ln(det X^u det X^s)` from the asymptotic frames to `z0`.
    /// Its winding around a contour counts the poles of `E_T` inside.
    pub log_det_x: C64,
}

fn initial_frames(lambda: C64, wave: &WaveProfile) -> Result<(Mat42, Mat42)> {
    let p = &wave.params;
    p.validate_spectral()?;
    let fu = unstable_frame_minus(lambda, p)?;
    let fs = stable_frame_plus(lambda, p, wave.wave_type == WaveType::III)?;
    Ok((fu, fs))
}

/// `E_T(z0; lambda) = det(W^s(z0) - W^u(z0))` with the chart coordinates of
/// the decaying subspaces.
pub fn riccati_evans_detail(
    lambda: C64,
    wave: &WaveProfile,
    chart: &Chart,
    z0: f64,
    opts: &EvansOptions,
) -> Result<EvansDetail> {
    check_span(wave, &[z0])?;
    let (fu, fs) = initial_frames(lambda, wave)?;
    let coeff = ConjugatedCoefficients::new(lambda, &wave.params, chart);
    let field = |z: f64| coeff.at(&wave.eval_array(z));
    let (zl, zr) = (wave.z_min(), wave.z_max());

    let left = coeff.at(&wave.eval_array(zl));
    let w_u = frame_to_chart(&fu, chart)?;
    let (w_u, g1) = integrate_riccati_traced(&w_u, zl - opts.relaxation, zl, |_| left, opts)?;
    let (w_u, g2) = integrate_riccati_traced(&w_u, zl, z0, field, opts)?;

    let right = coeff.at(&wave.eval_array(zr));
    let w_s = frame_to_chart(&fs, chart)?;
    let (w_s, g3) = integrate_riccati_traced(&w_s, zr + opts.relaxation, zr, |_| right, opts)?;
    let (w_s, g4) = integrate_riccati_traced(&w_s, zr, z0, field, opts)?;

    Ok(EvansDetail { value: det2(&(w_s - w_u)), w_u, w_s, log_det_x: g1 + g2 + g3 + g4 })
}

pub fn riccati_evans(lambda: C64, wave: &WaveProfile, chart: &Chart, z0: f64, opts: &EvansOptions) -> Result<C64> {
    riccati_evans_detail(lambda, wave, chart, z0, opts).map(|d| d.value)
}

/// Linear flow of a frame with renormalisation; returns an orthonormal
/// frame `q` and `ln det R` such that the unnormalised frame is `q R`.
pub fn integrate_frame_field<F>(f0: &Mat42, z_start: f64, z_end: f64, field: F, ode: &OdeOptions) -> Result<(Mat42, f64)>
where
    F: Fn(f64) -> Mat4,
{
    let (q0, r0) = qr42(f0);
    if r0.norm() == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let mut log_det = r0.re.ln();
    let (y, _) = integrate(
        |z, x: &[f64; 16]| pack42(&(field(z) * unpack42(x))),
        z_start,
        z_end,
        pack42(&q0),
        ode,
        |_, x| {
            let f = unpack42(x);
            let (n1, n2) = (f.column(0).norm(), f.column(1).norm());
            let cosang = f.column(0).dotc(&f.column(1)).norm() / (n1 * n2);
            if n1.max(n2) > 1e6 || n1.max(n2) / n1.min(n2) > 1e6 || n1.max(n2) < 1e-6 || cosang > 0.99 {
                let (q, r) = qr42(&f);
                log_det += r.re.ln();
                *x = pack42(&q);
                Monitor::Modified
            } else {
                Monitor::Continue
            }
        },
    )
    .map_err(Error::Integration)?;
    let (q, r) = qr42(&unpack42(&y));
    Ok((q, log_det + r.re.ln()))
}

/// Full linear flow of the spectral problem along the wave.
pub fn integrate_frame(
    f0: &Mat42,
    z_start: f64,
    z_end: f64,
    lambda: C64,
    wave: &WaveProfile,
    ode: &OdeOptions,
) -> Result<(Mat42, f64)> {
    check_span(wave, &[z_start, z_end])?;
    let coeff = ConjugatedCoefficients::new(lambda, &wave.params, &Chart::identity());
    integrate_frame_field(f0, z_start, z_end, |z| coeff.at(&wave.eval_array(z)), ode)
}

/// Evans function from decaying frames carried by the linear flow, kept as
/// an orthonormal part and a logged scale: `D = det[q_u q_s] * exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub struct OracleEvans {
    pub det_q: C64,
    pub log_scale: f64,
    pub q_u: Mat42,
    pub q_s: Mat42,
}

impl OracleEvans {
    pub fn value(&self) -> C64 {
        self.det_q * self.log_scale.exp()
    }

    /// `E_T` recovered from the frames via `det[F_u F_s] =
    /// det T^{-1} det X_u det X_s det(W_s - W_u)`.
    pub fn chart_value(&self, chart: &Chart) -> Result<C64> {
        let tu = chart.t * self.q_u;
        let ts = chart.t * self.q_s;
        let (xu, xs) = (upper(&tu), upper(&ts));
        for x in [&xu, &xs] {
            let cond = cond2(x);
            if !(cond < CHART_COND_LIMIT) {
                return Err(Error::NotInChart { cond });
            }
        }
        Ok(self.det_q / (chart.t_inv.determinant() * det2(&xu) * det2(&xs)))
    }
}

fn det_frames(a: &Mat42, b: &Mat42) -> C64 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<4, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<4, 2>(0, 2).copy_from(b);
    m.determinant()
}

pub fn direct_evans_oracle(lambda: C64, wave: &WaveProfile, z0: f64, opts: &EvansOptions) -> Result<OracleEvans> {
    check_span(wave, &[z0])?;
    let (fu, fs) = initial_frames(lambda, wave)?;
    let coeff = ConjugatedCoefficients::new(lambda, &wave.params, &Chart::identity());
    let field = |z: f64| coeff.at(&wave.eval_array(z));
    let (zl, zr) = (wave.z_min(), wave.z_max());

    let left = coeff.at(&wave.eval_array(zl));
    let (qu, l1) = integrate_frame_field(&fu, zl - opts.relaxation, zl, |_| left, &opts.ode)?;
    let (qu, l2) = integrate_frame_field(&qu, zl, z0, field, &opts.ode)?;

    let right = coeff.at(&wave.eval_array(zr));
    let (qs, l3) = integrate_frame_field(&fs, zr + opts.relaxation, zr, |_| right, &opts.ode)?;
    let (qs, l4) = integrate_frame_field(&qs, zr, z0, field, &opts.ode)?;

    Ok(OracleEvans { det_q: det_frames(&qu, &qs), log_scale: l1 + l2 + l3 + l4, q_u: qu, q_s: qs })
}
