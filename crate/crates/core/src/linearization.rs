//! Spectral problem along a wave: coefficient matrices, asymptotic
//! eigen-data with analytic branch selection, dispersion relations and the
//! essential/absolute spectrum. Vectors are ordered `(p, s, q, r)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c, normalize_phase, null_vector, Mat4, Mat42, Vec4, C64, I};
use crate::model::ModelParams;
use crate::wave::WaveProfile;

/// Eigenvalues closer than this are treated as unresolvable.
pub const DEGENERATE_GAP: f64 = 1e-10;
/// Distance to a branch point below which the closed forms are refused.
pub const BRANCH_POINT_TOL: f64 = 1e-12;

/// `A(z; lambda, epsilon)` from a state `(u, y, v, w)`.
#[inline]
pub fn slow_coeff_from_state(x: &[f64; 4], lambda: C64, p: &ModelParams) -> Mat4 {
    let [u, _y, v, w] = *x;
    let e = 1.0 / p.epsilon;
    let z = c(0.0);
    Mat4::new(
        z, z, c(1.0), z,
        z, z, z, lambda - 1.0 + 2.0 * w,
        (lambda + 2.0 * u * w) * e, z, c(-p.c * e), c(u * u * e),
        z, c(e), c(w * e), c((v - p.c) * e),
    )
}

pub fn slow_coeff_matrix(z: f64, lambda: C64, wave: &WaveProfile) -> Result<Mat4> {
    let s = wave.eval(z)?;
    Ok(slow_coeff_from_state(&s.to_array(), lambda, &wave.params))
}

/// `B(zeta; lambda, epsilon)` at fast-system data `(u, v, w)`; the fast
/// matrix depends on `zeta` only through these values.
pub fn fast_coeff_matrix(lambda: C64, u: f64, v: f64, w: f64, p: &ModelParams) -> Mat4 {
    let e = p.epsilon;
    let z = c(0.0);
    Mat4::new(
        z, z, c(e), z,
        z, z, z, (lambda - 1.0 + 2.0 * w) * e,
        lambda + 2.0 * u * w, z, c(-p.c), c(u * u),
        z, c(1.0), c(w), c(v - p.c),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticMatrices {
    pub a_minus: Mat4,
    pub a_plus: Mat4,
    /// Fast end state with `v_+ = w_+ = 0` and `u = u_inf`.
    pub b_plus: Mat4,
}

pub fn asymptotic_matrices(lambda: C64, p: &ModelParams) -> AsymptoticMatrices {
    AsymptoticMatrices {
        a_minus: slow_coeff_from_state(&[0.0, p.c, 0.0, 1.0], lambda, p),
        a_plus: slow_coeff_from_state(&[p.u_inf, 0.0, 0.0, 0.0], lambda, p),
        b_plus: fast_coeff_matrix(lambda, p.u_inf, 0.0, 0.0, p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    PlusSlow,
    PlusFast,
}

/// Closed-form branch: shift index (`-1`, `0`, `1`) and sign of the radical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BranchTag {
    pub index: i8,
    pub plus: bool,
}

impl fmt::Display for BranchTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.index, if self.plus { '+' } else { '-' })
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticEigenData {
    pub side: Side,
    pub eigenvalues: [C64; 4],
    pub eigenvectors: [Vec4; 4],
    pub tags: [BranchTag; 4],
}

impl AsymptoticEigenData {
    pub fn get(&self, index: i8, plus: bool) -> Option<(C64, Vec4)> {
        self.tags
            .iter()
            .position(|t| t.index == index && t.plus == plus)
            .map(|k| (self.eigenvalues[k], self.eigenvectors[k]))
    }
}

/// `(-c +/- sqrt(c^2 + 4 eps (lambda + shift))) / (2 eps)` with the principal
/// root, checked against the branch point.
fn mu_pair(lambda: C64, shift: f64, p: &ModelParams) -> Result<(C64, C64)> {
    let disc = p.c * p.c + 4.0 * p.epsilon * (lambda + shift);
    if disc.norm() / (4.0 * p.epsilon) < BRANCH_POINT_TOL {
        return Err(Error::BranchPoint(lambda));
    }
    let r = disc.sqrt();
    let d = 2.0 * p.epsilon;
    Ok(((-p.c + r) / d, (-p.c - r) / d))
}

fn side_matrix(side: Side, lambda: C64, p: &ModelParams) -> Mat4 {
    let m = asymptotic_matrices(lambda, p);
    match side {
        Side::Minus => m.a_minus,
        Side::PlusSlow => m.a_plus,
        Side::PlusFast => m.b_plus,
    }
}

/// Closed-form spatial eigenvalues of one asymptotic matrix, with numerical
/// eigenvectors matched to each branch.
pub fn asymptotic_eigenvalues(lambda: C64, p: &ModelParams, side: Side) -> Result<AsymptoticEigenData> {
    p.validate()?;
    if p.epsilon <= 0.0 {
        return Err(Error::SingularLimit);
    }
    let second = if side == Side::Minus { -1i8 } else { 1 };
    let (a0, b0) = mu_pair(lambda, 0.0, p)?;
    // A_- carries lambda + 1, A_+ and B_+ carry lambda - 1
    let (a1, b1) = mu_pair(lambda, -(second as f64), p)?;
    let scale = if side == Side::PlusFast { p.epsilon } else { 1.0 };
    let eigenvalues = [a0 * scale, b0 * scale, a1 * scale, b1 * scale];
    let tags = [
        BranchTag { index: 0, plus: true },
        BranchTag { index: 0, plus: false },
        BranchTag { index: second, plus: true },
        BranchTag { index: second, plus: false },
    ];
    let m = side_matrix(side, lambda, p);
    let mut eigenvectors = [Vec4::zeros(); 4];
    for (k, mu) in eigenvalues.iter().enumerate() {
        eigenvectors[k] = eigenvector(&m, *mu)?;
    }
    Ok(AsymptoticEigenData { side, eigenvalues, eigenvectors, tags })
}

fn eigenvector(m: &Mat4, mu: C64) -> Result<Vec4> {
    let (v, _) = null_vector(&(m - Mat4::identity() * mu));
    Ok(normalize_phase(&v))
}

fn selected_frame(data: &AsymptoticEigenData, picks: [(i8, bool); 2], lambda: C64) -> Result<Mat42> {
    let mut f = Mat42::zeros();
    for (col, (index, plus)) in picks.iter().enumerate() {
        let k = data.tags.iter().position(|t| t.index == *index && t.plus == *plus).expect("branch present");
        let mu = data.eigenvalues[k];
        let scale = 1.0 + mu.norm();
        for (j, other) in data.eigenvalues.iter().enumerate() {
            let gap = (other - mu).norm();
            if j != k && gap < DEGENERATE_GAP * scale {
                return Err(Error::NearDegenerate { lambda, gap });
            }
        }
        f.set_column(col, &data.eigenvectors[k]);
    }
    Ok(f)
}

/// Frame of `A_-` for the branches `mu_0^+` and `mu_{-1}^+`.
pub fn unstable_frame_minus(lambda: C64, p: &ModelParams) -> Result<Mat42> {
    let data = asymptotic_eigenvalues(lambda, p, Side::Minus)?;
    selected_frame(&data, [(0, true), (-1, true)], lambda)
}

/// Frame of `A_+` (or `B_+`) for the branches `rho_0^-` and `rho_1^-`.
pub fn stable_frame_plus(lambda: C64, p: &ModelParams, fast: bool) -> Result<Mat42> {
    let side = if fast { Side::PlusFast } else { Side::PlusSlow };
    let data = asymptotic_eigenvalues(lambda, p, side)?;
    selected_frame(&data, [(0, false), (1, false)], lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DispersionFamily {
    /// Both end states in the slow system.
    Standard,
    /// Right end state in the fast system.
    TypeIII,
}

#[derive(Clone, Debug)]
pub struct DispersionCurve {
    pub label: &'static str,
    pub points: Vec<(f64, C64)>,
    /// Largest relative smallest-singular-value of `M - ik` over the samples.
    pub max_residual: f64,
}

/// Curves `lambda(k)` on which an asymptotic matrix has eigenvalue `ik`.
pub fn dispersion_curves(p: &ModelParams, ks: &[f64], family: DispersionFamily) -> Vec<DispersionCurve> {
    let e = p.epsilon;
    type Curve = (&'static str, fn(f64, f64, f64) -> C64, Side);
    let curves: Vec<Curve> = match family {
        DispersionFamily::Standard => vec![
            ("A-:-1", |k, e, cc| C64::new(-e * k * k - 1.0, cc * k), Side::Minus),
            ("A-/A+:0", |k, e, cc| C64::new(-e * k * k, cc * k), Side::Minus),
            ("A+:1", |k, e, cc| C64::new(1.0 - e * k * k, cc * k), Side::PlusSlow),
        ],
        DispersionFamily::TypeIII => vec![
            ("A-:-1", |k, e, cc| C64::new(-e * k * k - 1.0, cc * k), Side::Minus),
            ("A-:0", |k, e, cc| C64::new(-e * k * k, cc * k), Side::Minus),
            ("B+:0", |k, e, cc| C64::new(-k * k, cc * k) / e, Side::PlusFast),
            ("B+:1", |k, e, cc| C64::new(e - k * k, cc * k) / e, Side::PlusFast),
        ],
    };
    curves
        .into_iter()
        .map(|(label, f, side)| {
            let mut max_residual: f64 = 0.0;
            let points = ks
                .iter()
                .map(|&k| {
                    let lambda = f(k, e, p.c);
                    let m = side_matrix(side, lambda, p);
                    let shifted = m - Mat4::identity() * (I * k);
                    let (_, smin) = null_vector(&shifted);
                    max_residual = max_residual.max(smin / m.norm());
                    (k, lambda)
                })
                .collect();
            DispersionCurve { label, points, max_residual }
        })
        .collect()
}

/// Right end of the absolute spectrum `(-inf, 1 - c^2/(4 eps)]`.
pub fn absolute_spectrum_edge(p: &ModelParams) -> f64 {
    1.0 - p.c * p.c / (4.0 * p.epsilon)
}

/// Exponential rates `nu` of the right-hand weight that move the `A_+`
/// essential spectrum into the open left half plane.
pub fn weight_interval(p: &ModelParams) -> Result<(f64, f64)> {
    let disc = p.c * p.c - 4.0 * p.epsilon;
    if disc <= 0.0 {
        return Err(Error::NoStabilisingWeight);
    }
    let r = disc.sqrt();
    Ok(((p.c - r) / (2.0 * p.epsilon), (p.c + r) / (2.0 * p.epsilon)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Omega1,
    EssentialSpectrum,
    Omega2,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Omega1 => "Omega1",
            Region::EssentialSpectrum => "EssentialSpectrum",
            Region::Omega2 => "Omega2",
        })
    }
}

/// Position of `lambda` relative to the outermost dispersion curves; points
/// on a curve count as essential spectrum.
pub fn region_classify(lambda: C64, p: &ModelParams) -> Region {
    let k = lambda.im / p.c;
    let bend = p.epsilon * k * k;
    if lambda.re > 1.0 - bend {
        Region::Omega1
    } else if lambda.re < -1.0 - bend {
        Region::Omega2
    } else {
        Region::EssentialSpectrum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subspace_sin;
    use proptest::prelude::*;

    fn prm() -> ModelParams {
        ModelParams::new(0.01, 1.0, 1.0).unwrap()
    }

    fn schur_eigs(m: &Mat4) -> Vec<C64> {
        m.schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
    }

    #[test]
    fn asymptotic_matrix_entries() {
        let l = C64::new(0.3, -0.7);
        let p = ModelParams::new(0.02, 0.8, 1.3).unwrap();
        let m = asymptotic_matrices(l, &p);
        assert_eq!(m.a_minus[(1, 3)], l + 1.0);
        assert_eq!(m.a_plus[(1, 3)], l - 1.0);
        assert_eq!(m.b_plus[(3, 2)], c(0.0));
        assert!((m.a_plus[(2, 3)] - c(1.69 / 0.02)).norm() < 1e-12);
        assert!((m.a_minus[(3, 2)] - c(1.0 / 0.02)).norm() < 1e-12);
        assert!((m.b_plus - m.a_plus * c(p.epsilon)).norm() < 1e-12);
    }

    #[test]
    fn fast_entries_and_scaling() {
        let p = ModelParams::new(0.03, 0.9, 1.0).unwrap();
        let l = C64::new(-0.2, 1.5);
        let (u, v, w) = (0.7, 0.1, 0.4);
        let b = fast_coeff_matrix(l, u, v, w, &p);
        assert!((b[(1, 3)] - (l - 1.0 + 2.0 * w) * 0.03).norm() < 1e-15);
        let a = slow_coeff_from_state(&[u, 0.0, v, w], l, &p);
        assert!((b - a * c(p.epsilon)).norm() < 1e-12);
    }

    #[test]
    fn rows_scale_with_epsilon() {
        let x = [0.6, 0.2, -0.1, 0.3];
        let l = C64::new(0.4, 0.1);
        let a1 = slow_coeff_from_state(&x, l, &ModelParams::new(0.01, 1.0, 1.0).unwrap());
        let a2 = slow_coeff_from_state(&x, l, &ModelParams::new(0.02, 1.0, 1.0).unwrap());
        for j in 0..4 {
            for r in 0..2 {
                assert_eq!(a1[(r, j)], a2[(r, j)]);
            }
            for r in 2..4 {
                assert!((a1[(r, j)] - a2[(r, j)] * 2.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_zero_branches() {
        let d = asymptotic_eigenvalues(c(0.0), &prm(), Side::Minus).unwrap();
        let (m0p, _) = d.get(0, true).unwrap();
        let (m0m, _) = d.get(0, false).unwrap();
        assert!(m0p.norm() < 1e-12);
        assert!((m0m - c(-100.0)).norm() < 1e-10);
        let (mp, _) = d.get(-1, true).unwrap();
        let (mm, _) = d.get(-1, false).unwrap();
        let r = 1.04f64.sqrt();
        assert!((mp - c((-1.0 + r) / 0.02)).norm() < 1e-10);
        assert!((mm - c((-1.0 - r) / 0.02)).norm() < 1e-10);
        assert!((mp.re - 0.990195).abs() < 1e-5 && (mm.re + 100.990195).abs() < 1e-5);
    }

    #[test]
    fn branch_point_is_refused() {
        let lbp = C64::new(-1.0 / 0.04, 0.0);
        assert!(matches!(asymptotic_eigenvalues(lbp, &prm(), Side::Minus), Err(Error::BranchPoint(_))));
        assert!(matches!(asymptotic_eigenvalues(lbp + 1.0, &prm(), Side::PlusSlow), Err(Error::BranchPoint(_))));
    }

    #[test]
    fn fast_eigenvalues_are_scaled_slow_ones() {
        let p = ModelParams::new(0.02, 0.9, 1.1).unwrap();
        for l in [C64::new(0.3, 0.2), C64::new(-3.0, 5.0), C64::new(7.0, -1.0)] {
            let s = asymptotic_eigenvalues(l, &p, Side::PlusSlow).unwrap();
            let f = asymptotic_eigenvalues(l, &p, Side::PlusFast).unwrap();
            for k in 0..4 {
                assert_eq!(s.tags[k], f.tags[k]);
                assert!((f.eigenvalues[k] - s.eigenvalues[k] * p.epsilon).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rho0_equals_mu0() {
        let l = C64::new(0.7, -2.0);
        let m = asymptotic_eigenvalues(l, &prm(), Side::Minus).unwrap();
        let r = asymptotic_eigenvalues(l, &prm(), Side::PlusSlow).unwrap();
        assert_eq!(m.get(0, true).unwrap().0, r.get(0, true).unwrap().0);
        assert_eq!(m.get(0, false).unwrap().0, r.get(0, false).unwrap().0);
    }

    #[test]
    fn closed_forms_match_schur_on_random_lambda() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = prm();
        let mut count = 0;
        while count < 200 {
            let l = C64::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            if l.norm() > 20.0 {
                continue;
            }
            count += 1;
            for side in [Side::Minus, Side::PlusSlow, Side::PlusFast] {
                let d = asymptotic_eigenvalues(l, &p, side).unwrap();
                let m = side_matrix(side, l, &p);
                let mut num = schur_eigs(&m);
                for mu in d.eigenvalues {
                    let (k, dist) = num
                        .iter()
                        .enumerate()
                        .map(|(k, x)| (k, (x - mu).norm()))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    assert!(dist < 1e-10 * (1.0 + mu.norm()), "{side:?} {l} {mu} {dist:e}");
                    num.remove(k);
                }
                for (mu, v) in d.eigenvalues.iter().zip(&d.eigenvectors) {
                    let r = (m * v - v * *mu).norm();
                    assert!(r < 1e-10 * (1.0 + m.norm()), "eigvec residual {r:e}");
                }
            }
        }
    }

    #[test]
    fn frames_in_omega1_split_correctly() {
        let p = prm();
        let l = C64::new(2.0, 0.5);
        let d = asymptotic_eigenvalues(l, &p, Side::Minus).unwrap();
        assert!(d.get(0, true).unwrap().0.re > 0.0 && d.get(-1, true).unwrap().0.re > 0.0);
        let d = asymptotic_eigenvalues(l, &p, Side::PlusSlow).unwrap();
        assert!(d.get(0, false).unwrap().0.re < 0.0 && d.get(1, false).unwrap().0.re < 0.0);
        let f = unstable_frame_minus(l, &p).unwrap();
        for j in 0..2 {
            let col = f.column(j);
            assert!((col.norm() - 1.0).abs() < 1e-12);
            let first = col.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
        }
    }

    #[test]
    fn branch_selection_inside_essential_spectrum() {
        let d = asymptotic_eigenvalues(c(-0.5), &prm(), Side::Minus).unwrap();
        let (mu, _) = d.get(0, true).unwrap();
        // principal root of 1 - 0.02 is below 1, so mu_0^+ has crossed to Re < 0
        assert!((mu - c((-1.0 + 0.98f64.sqrt()) / 0.02)).norm() < 1e-12);
        let (mu1, _) = d.get(-1, true).unwrap();
        assert!(mu1.re > 0.0);
        assert!(unstable_frame_minus(c(-0.5), &prm()).is_ok());
    }

    #[test]
    fn slow_and_fast_stable_frames_agree() {
        let p = prm();
        for l in [C64::new(0.5, 0.0), C64::new(3.0, 4.0), C64::new(-0.3, 0.1)] {
            let a = stable_frame_plus(l, &p, false).unwrap();
            let b = stable_frame_plus(l, &p, true).unwrap();
            assert!(subspace_sin(&a, &b) < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn frames_vary_continuously(re in -10.0f64..10.0, im in 0.05f64..10.0, ang in 0.0f64..std::f64::consts::TAU) {
            let p = prm();
            let l = C64::new(re, im);
            let dl = C64::from_polar(1e-6, ang);
            let a = unstable_frame_minus(l, &p).unwrap();
            let b = unstable_frame_minus(l + dl, &p).unwrap();
            prop_assert!(subspace_sin(&a, &b) < 1e-4);
            let a = stable_frame_plus(l, &p, false).unwrap();
            let b = stable_frame_plus(l + dl, &p, false).unwrap();
            prop_assert!(subspace_sin(&a, &b) < 1e-4);
        }

        #[test]
        fn real_lambda_gives_real_frames(l in 0.0f64..20.0) {
            let p = prm();
            for f in [unstable_frame_minus(c(l), &p).unwrap(), stable_frame_plus(c(l), &p, false).unwrap()] {
                prop_assert!(f.iter().all(|z| z.im.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn dispersion_intercepts_and_verification() {
        let p = prm();
        let curves = dispersion_curves(&p, &[0.0], DispersionFamily::Standard);
        let intercepts: Vec<C64> = curves.iter().map(|cv| cv.points[0].1).collect();
        assert_eq!(intercepts, vec![c(-1.0), c(0.0), c(1.0)]);
        let ks: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.5).collect();
        for cv in dispersion_curves(&p, &ks, DispersionFamily::Standard)
            .into_iter()
            .chain(dispersion_curves(&p, &ks, DispersionFamily::TypeIII))
        {
            assert!(cv.max_residual < 1e-10, "{} {:e}", cv.label, cv.max_residual);
        }
        // A_+(1 - eps k^2 + i c k) has eigenvalue ik at k = 0.5
        let k = 0.5;
        let l = C64::new(1.0 - 0.01 * k * k, k);
        let eigs = schur_eigs(&asymptotic_matrices(l, &p).a_plus);
        assert!(eigs.iter().any(|mu| (mu - I * k).norm() < 1e-10));
    }

    #[test]
    fn type_three_curves_two_and_three_coincide() {
        let p = ModelParams::new(0.01, 0.67, 1.0).unwrap();
        let ks: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.1).collect();
        let curves = dispersion_curves(&p, &ks, DispersionFamily::TypeIII);
        let on_parabola = |l: C64| (l.re + p.epsilon * (l.im / p.c).powi(2)).abs() / (1.0 + l.norm());
        for (_, l) in curves[1].points.iter().chain(&curves[2].points) {
            assert!(on_parabola(*l) < 1e-10);
        }
    }

    #[test]
    fn absolute_edge_and_weights() {
        assert_eq!(absolute_spectrum_edge(&prm()), -24.0);
        let p = ModelParams::new(0.25, 1.0, 1.0).unwrap();
        assert_eq!(absolute_spectrum_edge(&p), 0.0);
        let p = ModelParams::new(0.01, 0.2, 1.0).unwrap();
        assert!(absolute_spectrum_edge(&p).abs() < 1e-15);
        let (lo, hi) = weight_interval(&prm()).unwrap();
        assert!((lo - 1.0102051).abs() < 1e-6 && (hi - 98.9897949).abs() < 1e-6);
        for nu in [lo, hi] {
            assert!((0.01 * nu * nu - nu + 1.0).abs() < 1e-10);
        }
        let p = ModelParams::new(0.25, 1.0, 1.0).unwrap();
        assert!(matches!(weight_interval(&p), Err(Error::NoStabilisingWeight)));
        let p = ModelParams::new(0.25 - 1e-9, 1.0, 1.0).unwrap();
        let (lo, hi) = weight_interval(&p).unwrap();
        assert!((lo - 2.0).abs() < 1e-3 && (hi - 2.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn edge_negative_iff_stabilisable(c2 in 0.01f64..4.0, e in 0.001f64..1.0) {
            let p = ModelParams::new(e, c2.sqrt(), 1.0).unwrap();
            prop_assert_eq!(absolute_spectrum_edge(&p) < 0.0, c2 > 4.0 * e);
        }
    }

    #[test]
    fn regions() {
        let p = prm();
        assert_eq!(region_classify(c(2.0), &p), Region::Omega1);
        assert_eq!(region_classify(c(0.0), &p), Region::EssentialSpectrum);
        assert_eq!(region_classify(c(-2.0), &p), Region::Omega2);
        assert_eq!(region_classify(C64::new(-98.0, 100.0), &p), Region::Omega1);
        assert_eq!(region_classify(C64::new(-150.0, 100.0), &p), Region::Omega2);
    }
}
