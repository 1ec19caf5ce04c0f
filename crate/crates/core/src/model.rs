//! Right-hand sides and singular-limit geometry of the travelling-wave
//! problem in Liénard coordinates. States are ordered `(u, y, v, w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c as cplx, null_vector, Mat4};

/// Half-width of the band around `F = 0` reported as "on the fold".
pub const FOLD_DEAD_BAND: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub epsilon: f64,
    pub c: f64,
    pub u_inf: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, c: f64, u_inf: f64) -> Result<Self> {
        let p = Self { epsilon, c, u_inf };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParams(format!("c must be > 0, got {}", self.c)));
        }
        if !(self.u_inf > 0.0 && self.u_inf.is_finite()) {
            return Err(Error::InvalidParams(format!("u_inf must be > 0, got {}", self.u_inf)));
        }
        Ok(())
    }

    /// Spectral computations need the absolute spectrum in the left half plane.
    pub fn validate_spectral(&self) -> Result<()> {
        self.validate()?;
        if self.c * self.c <= 4.0 * self.epsilon {
            return Err(Error::InvalidParams(format!(
                "spectral work needs c^2 > 4 epsilon (c = {}, epsilon = {})",
                self.c, self.epsilon
            )));
        }
        Ok(())
    }

    pub fn with_c(&self, c: f64) -> Self {
        Self { c, ..*self }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SlowState {
    pub u: f64,
    pub y: f64,
    pub v: f64,
    pub w: f64,
}

impl SlowState {
    pub const fn new(u: f64, y: f64, v: f64, w: f64) -> Self {
        Self { u, y, v, w }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.u, self.y, self.v, self.w]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.u, k * self.y, k * self.v, k * self.w)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Left background state `(0, c, 0, 1)`.
    pub fn left_state(c: f64) -> Self {
        Self::new(0.0, c, 0.0, 1.0)
    }

    /// Right background state `(u_inf, 0, 0, 0)`.
    pub fn right_state(u_inf: f64) -> Self {
        Self::new(u_inf, 0.0, 0.0, 0.0)
    }
}

pub fn slow_rhs(s: SlowState, p: &ModelParams) -> Result<SlowState> {
    if p.epsilon == 0.0 {
        return Err(Error::SingularLimit);
    }
    Ok(fast_rhs(s, p).scale(1.0 / p.epsilon))
}

/// Slow vector field without the `1/epsilon` check, for hot loops that
/// already validated `epsilon > 0`.
#[inline]
pub fn slow_rhs_array(x: &[f64; 4], c: f64, epsilon: f64) -> [f64; 4] {
    let [u, y, v, w] = *x;
    [v, -w * (1.0 - w), (-c * v + u * u * w) / epsilon, (y + v * w - c * w) / epsilon]
}

/// Jacobian of the slow vector field; equals the spectral matrix at
/// `lambda = 0`.
#[inline]
pub fn slow_jacobian_array(x: &[f64; 4], c: f64, epsilon: f64) -> [[f64; 4]; 4] {
    let [u, _y, v, w] = *x;
    let e = 1.0 / epsilon;
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0 + 2.0 * w],
        [2.0 * u * w * e, 0.0, -c * e, u * u * e],
        [0.0, e, w * e, (v - c) * e],
    ]
}

pub fn fast_rhs(s: SlowState, p: &ModelParams) -> SlowState {
    let SlowState { u, y, v, w } = s;
    let e = p.epsilon;
    SlowState::new(e * v, -e * w * (1.0 - w), -p.c * v + u * u * w, y + v * w - p.c * w)
}

pub fn layer_rhs(s: SlowState, c: f64) -> SlowState {
    let SlowState { u, y, v, w } = s;
    SlowState::new(0.0, 0.0, -c * v + u * u * w, y + v * w - c * w)
}

/// `(v, y)` on the critical manifold above `(u, w)`.
pub fn critical_manifold_lift(u: f64, w: f64, c: f64) -> (f64, f64) {
    (u * u * w / c, -u * u * w * w / c + c * w)
}

pub fn fold_value(u: f64, w: f64, c: f64) -> f64 {
    2.0 * u * u * w - c * c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sheet {
    Attracting,
    Repelling,
    Fold,
}

pub fn sheet(u: f64, w: f64, c: f64) -> Sheet {
    let f = fold_value(u, w, c);
    if f.abs() < FOLD_DEAD_BAND {
        Sheet::Fold
    } else if f < 0.0 {
        Sheet::Attracting
    } else {
        Sheet::Repelling
    }
}

/// Reduced flow multiplied by the cofactor matrix, in the rescaled time
/// `dz/dzbar = c^2 - 2 u^2 w`.
pub fn desingularised_rhs(u: f64, w: f64, c: f64) -> (f64, f64) {
    (
        c * u * u * w - 2.0 * u.powi(4) * w * w / c,
        -c * w * (1.0 - w) + 2.0 * u.powi(3) * w.powi(3) / c,
    )
}

pub fn desingularised_jacobian(u: f64, w: f64, c: f64) -> [[f64; 2]; 2] {
    [
        [2.0 * c * u * w - 8.0 * u.powi(3) * w * w / c, c * u * u - 4.0 * u.powi(4) * w / c],
        [6.0 * u * u * w.powi(3) / c, -c + 2.0 * c * w + 6.0 * u.powi(3) * w * w / c],
    ]
}

/// Folded saddle `(u_H, w_H)`.
pub fn canard_point(c: f64) -> (f64, f64) {
    let gamma = (c * c + 8.0).sqrt();
    let u = c / 4.0 * (c + gamma);
    (u, 1.0 / (u + 1.0))
}

/// Closed-form first components `f^+(c), f^-(c)` of the canard eigenvectors
/// `(f, -1)`; `f^+` belongs to the positive eigenvalue.
pub fn canard_eigenvector_slopes(c: f64) -> (f64, f64) {
    let g = (c * c + 8.0).sqrt();
    let cg2 = (c + g) * (c + g);
    let num = c * c * cg2 * cg2;
    let base = 64.0 * (c * c + c * g + 1.0);
    let rad = (16.0 + 24.0 * c * g - 48.0 * c * c + 6.0 * c.powi(3) * g - 6.0 * c.powi(4)).sqrt();
    (num / (base + 2.0 * cg2 * rad), num / (base - 2.0 * cg2 * rad))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquilibriumKind {
    CentreUnstable,
    CentreStable,
    FoldedSaddleCanard,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumInfo {
    pub location: (f64, f64),
    pub eigenvalues: [f64; 2],
    pub eigenvectors: [[f64; 2]; 2],
    pub kind: EquilibriumKind,
}

/// Unit norm, first nonzero component positive.
pub fn normalize2(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    let s = if v[0].abs() > 1e-14 * n { v[0].signum() } else { v[1].signum() };
    [s * v[0] / n, s * v[1] / n]
}

fn eigvec2(j: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    let m = Mat4::from_fn(|r, k| if r < 2 && k < 2 { cplx(j[r][k] - if r == k { lambda } else { 0.0 }) } else { cplx(0.0) });
    // pad to 4x4 with an identity block so the null space stays 1-D
    let mut m = m;
    m[(2, 2)] = cplx(1.0);
    m[(3, 3)] = cplx(1.0);
    let (v, _) = null_vector(&m);
    normalize2([v[0].re, v[1].re])
}

/// Equilibria of the desingularised system with their eigen-data.
pub fn equilibria(c: f64, u_inf: f64) -> Result<Vec<EquilibriumInfo>> {
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("c must be > 0, got {c}")));
    }
    let left = EquilibriumInfo {
        location: (0.0, 1.0),
        eigenvalues: [c, 0.0],
        eigenvectors: [[0.0, 1.0], [1.0, 0.0]],
        kind: EquilibriumKind::CentreUnstable,
    };
    let right = EquilibriumInfo {
        location: (u_inf, 0.0),
        eigenvalues: [-c, 0.0],
        eigenvectors: [normalize2([-u_inf * u_inf, 1.0]), [1.0, 0.0]],
        kind: EquilibriumKind::CentreStable,
    };
    let (uh, wh) = canard_point(c);
    let j = desingularised_jacobian(uh, wh, c);
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let (lp, lm) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let (fp, fm) = canard_eigenvector_slopes(c);
    let closed = [normalize2([fp, -1.0]), normalize2([fm, -1.0])];
    let numeric = [eigvec2(&j, lp), eigvec2(&j, lm)];
    for (a, b) in closed.iter().zip(&numeric) {
        let d = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
        if d > 1e-8 {
            return Err(Error::Internal(format!("canard eigenvector closed form off by {d:e} at c = {c}")));
        }
    }
    let canard = EquilibriumInfo {
        location: (uh, wh),
        eigenvalues: [lp, lm],
        eigenvectors: closed,
        kind: EquilibriumKind::FoldedSaddleCanard,
    };
    Ok(vec![left, right, canard])
}

/// Far end of the fast fibre through `(u, v_minus, w_minus)`, reflected
/// about the fold at fixed `u`.
pub fn jump_target(u: f64, v_minus: f64, w_minus: f64, c: f64) -> Result<(f64, f64)> {
    if u == 0.0 {
        return Err(Error::DegenerateJump);
    }
    let w_plus = c * c / (u * u) - w_minus;
    let v_plus = v_minus + u * u / c * (w_plus - w_minus);
    Ok((v_plus, w_plus))
}
