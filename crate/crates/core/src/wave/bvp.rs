//! Fourth-order Hermite-Simpson collocation for the slow system on a
//! truncated line, with projection boundary conditions, an interior phase
//! condition, damped Newton on a banded Jacobian and defect-driven mesh
//! refinement.

use crate::error::{Error, Result};
use crate::linalg::{c as cplx, null_vector, BandMatrix, Mat4};
use crate::model::{slow_jacobian_array, slow_rhs_array, ModelParams};

type V4 = [f64; 4];
type M4 = [[f64; 4]; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol_newton: f64,
    pub tol_bc: f64,
    pub tol_w: f64,
    /// Relative collocation defect that triggers mesh refinement.
    pub tol_mesh: f64,
    pub max_iter: usize,
    pub max_nodes: usize,
    pub max_refinements: usize,
    pub l_minus: f64,
    pub l_plus: f64,
    /// Shock detection constant: a layer is present when
    /// `max |w'| > kappa / sqrt(epsilon)`.
    pub kappa: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_newton: 1e-9,
            tol_bc: 1e-7,
            tol_w: 1e-6,
            tol_mesh: 1e-6,
            max_iter: 60,
            max_nodes: 400_000,
            max_refinements: 25,
            l_minus: 50.0,
            l_plus: 50.0,
            kappa: 0.1,
        }
    }
}

/// Where the translation-fixing condition `w(z_phase) = w_target` sits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub z: f64,
    pub w: f64,
}

struct Collocation {
    c: f64,
    eps: f64,
    right: V4,
    left_rows: [V4; 2],
    right_row: V4,
    phase_w: f64,
}

/// Left eigenvectors of the slow Jacobian at `(0, c, 0, 1)` for its two
/// stable eigenvalues.
pub(crate) fn left_stable_rows(c: f64, eps: f64) -> [V4; 2] {
    let j = slow_jacobian_array(&[0.0, c, 0.0, 1.0], c, eps);
    let jt = Mat4::from_fn(|r, k| cplx(j[k][r]));
    let a = c / eps;
    let mus = [-a, (-a - (a * a + 4.0 / eps).sqrt()) / 2.0];
    mus.map(|mu| {
        let (v, _) = null_vector(&(jt - Mat4::identity() * cplx(mu)));
        let r = [v[0].re, v[1].re, v[2].re, v[3].re];
        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        r.map(|x| x / n)
    })
}

/// Centre manifold of `(0, c, 0, 1)` to leading order in `u`, with its
/// `u`-derivative. The left tail is algebraic in `z`, so the linear
/// projection alone leaves an `O(u^2)` mismatch at the truncation point.
pub(crate) fn left_manifold(c: f64, u: f64) -> (V4, V4) {
    let c2 = c * c;
    let w = 1.0 - 2.0 * u.powi(3) / c2;
    let dw = -6.0 * u * u / c2;
    let y = c * w - u * u * w * w / c;
    let dy = c * dw - (2.0 * u * w * w + 2.0 * u * u * w * dw) / c;
    let v = u * u * w / c;
    let dv = (2.0 * u * w + u * u * dw) / c;
    ([u, y, v, w], [1.0, dy, dv, dw])
}

/// Left null vector of the slow Jacobian on the line of right equilibria.
pub(crate) fn right_centre_row(c: f64, eps: f64, u_inf: f64) -> V4 {
    [1.0, u_inf * u_inf / c, eps / c, 0.0]
}

#[inline]
fn dot(a: &V4, b: &V4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn matmul(a: &M4, b: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl Collocation {
    fn new(p: &ModelParams, phase_w: f64) -> Self {
        Self {
            c: p.c,
            eps: p.epsilon,
            right: [p.u_inf, 0.0, 0.0, 0.0],
            left_rows: left_stable_rows(p.c, p.epsilon),
            right_row: right_centre_row(p.c, p.epsilon, p.u_inf),
            phase_w,
        }
    }

    #[inline]
    fn f(&self, y: &V4) -> V4 {
        slow_rhs_array(y, self.c, self.eps)
    }

    #[inline]
    fn jac(&self, y: &V4) -> M4 {
        slow_jacobian_array(y, self.c, self.eps)
    }

    fn midpoint(&self, h: f64, a: &V4, b: &V4, fa: &V4, fb: &V4) -> V4 {
        let mut m = [0.0; 4];
        for k in 0..4 {
            m[k] = 0.5 * (a[k] + b[k]) - h / 8.0 * (fb[k] - fa[k]);
        }
        m
    }

    fn row_base(i: usize, phase_node: usize) -> usize {
        2 + 4 * i + usize::from(i >= phase_node)
    }

    fn residual(&self, z: &[f64], y: &[V4], phase_node: usize) -> Vec<f64> {
        let n = z.len();
        let mut r = vec![0.0; 4 * n];
        let (h0, _) = left_manifold(self.c, y[0][0]);
        let d0: V4 = std::array::from_fn(|k| y[0][k] - h0[k]);
        r[0] = dot(&self.left_rows[0], &d0);
        r[1] = dot(&self.left_rows[1], &d0);
        let fs: Vec<V4> = y.iter().map(|s| self.f(s)).collect();
        for i in 0..n - 1 {
            let h = z[i + 1] - z[i];
            let ym = self.midpoint(h, &y[i], &y[i + 1], &fs[i], &fs[i + 1]);
            let fm = self.f(&ym);
            let base = Self::row_base(i, phase_node);
            for k in 0..4 {
                r[base + k] = y[i + 1][k] - y[i][k] - h / 6.0 * (fs[i][k] + 4.0 * fm[k] + fs[i + 1][k]);
            }
        }
        r[2 + 4 * phase_node] = y[phase_node][3] - self.phase_w;
        let dn: V4 = std::array::from_fn(|k| y[n - 1][k] - self.right[k]);
        r[4 * n - 1] = dot(&self.right_row, &dn);
        r
    }

    fn jacobian(&self, z: &[f64], y: &[V4], phase_node: usize) -> BandMatrix {
        let n = z.len();
        let mut jm = BandMatrix::zeros(4 * n, 6, 5);
        let (_, dh) = left_manifold(self.c, y[0][0]);
        for (row, lr) in self.left_rows.iter().enumerate() {
            for k in 0..4 {
                jm.add(row, k, lr[k]);
            }
            jm.add(row, 0, -dot(lr, &dh));
        }
        let fs: Vec<V4> = y.iter().map(|s| self.f(s)).collect();
        let js: Vec<M4> = y.iter().map(|s| self.jac(s)).collect();
        for i in 0..n - 1 {
            let h = z[i + 1] - z[i];
            let ym = self.midpoint(h, &y[i], &y[i + 1], &fs[i], &fs[i + 1]);
            let jmid = self.jac(&ym);
            // d y_m / d y_i = I/2 + h/8 J_i ; d y_m / d y_{i+1} = I/2 - h/8 J_{i+1}
            let mut da = js[i];
            let mut db = js[i + 1];
            for a in 0..4 {
                for b in 0..4 {
                    da[a][b] *= h / 8.0;
                    db[a][b] *= -h / 8.0;
                }
                da[a][a] += 0.5;
                db[a][a] += 0.5;
            }
            let ma = matmul(&jmid, &da);
            let mb = matmul(&jmid, &db);
            let base = Self::row_base(i, phase_node);
            for a in 0..4 {
                for b in 0..4 {
                    let id = if a == b { 1.0 } else { 0.0 };
                    let left = -id - h / 6.0 * (js[i][a][b] + 4.0 * ma[a][b]);
                    let right = id - h / 6.0 * (js[i + 1][a][b] + 4.0 * mb[a][b]);
                    jm.add(base + a, 4 * i + b, left);
                    jm.add(base + a, 4 * (i + 1) + b, right);
                }
            }
        }
        jm.add(2 + 4 * phase_node, 4 * phase_node + 3, 1.0);
        for k in 0..4 {
            jm.add(4 * n - 1, 4 * (n - 1) + k, self.right_row[k]);
        }
        jm
    }

    fn newton(&self, z: &[f64], y: &mut [V4], phase_node: usize, cfg: &SolverConfig) -> Result<f64> {
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut r = self.residual(z, y, phase_node);
        let mut rn = norm(&r);
        let mut best = rn;
        for iter in 0..cfg.max_iter {
            if !rn.is_finite() {
                break;
            }
            if rn < cfg.tol_newton {
                return Ok(rn);
            }
            let lu = self
                .jacobian(z, y, phase_node)
                .factor()
                .ok_or(Error::NoConvergence { iterations: iter, best_residual: best })?;
            let dx = lu.solve(&r);
            let mut alpha = 1.0;
            loop {
                let trial: Vec<V4> =
                    y.iter().enumerate().map(|(i, s)| std::array::from_fn(|k| s[k] - alpha * dx[4 * i + k])).collect();
                let rt = self.residual(z, &trial, phase_node);
                let rtn = norm(&rt);
                if rtn.is_finite() && (rtn < (1.0 - 0.25 * alpha) * rn || (alpha == 1.0 && rtn < 10.0 * cfg.tol_newton)) {
                    y.copy_from_slice(&trial);
                    r = rt;
                    rn = rtn;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1.0 / 1024.0 {
                    return Err(Error::NoConvergence { iterations: iter + 1, best_residual: best });
                }
            }
            best = best.min(rn);
        }
        if rn < cfg.tol_newton {
            Ok(rn)
        } else {
            Err(Error::NoConvergence { iterations: cfg.max_iter, best_residual: best })
        }
    }

    /// Relative defect `|p' - f(p)| / (1 + |f(p)|)` of the cubic Hermite
    /// interpolant at the quarter points of each interval.
    fn defects(&self, z: &[f64], y: &[V4]) -> Vec<f64> {
        let fs: Vec<V4> = y.iter().map(|s| self.f(s)).collect();
        (0..z.len() - 1)
            .map(|i| {
                let h = z[i + 1] - z[i];
                [0.25, 0.75]
                    .iter()
                    .map(|&t| {
                        let (p, dp) = hermite(t, h, &y[i], &y[i + 1], &fs[i], &fs[i + 1]);
                        let fp = self.f(&p);
                        (0..4).map(|k| (dp[k] - fp[k]).abs() / (1.0 + fp[k].abs())).fold(0.0, f64::max)
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Value and derivative of the cubic Hermite interpolant at `t` in `[0, 1]`.
pub(crate) fn hermite(t: f64, h: f64, a: &V4, b: &V4, fa: &V4, fb: &V4) -> (V4, V4) {
    let t2 = t * t;
    let t3 = t2 * t;
    let (h00, h10, h01, h11) = (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2);
    let (d00, d10, d01, d11) = (6.0 * t2 - 6.0 * t, 3.0 * t2 - 4.0 * t + 1.0, -6.0 * t2 + 6.0 * t, 3.0 * t2 - 2.0 * t);
    let mut p = [0.0; 4];
    let mut dp = [0.0; 4];
    for k in 0..4 {
        p[k] = h00 * a[k] + h * h10 * fa[k] + h01 * b[k] + h * h11 * fb[k];
        dp[k] = (d00 * a[k] + d01 * b[k]) / h + d10 * fa[k] + d11 * fb[k];
    }
    (p, dp)
}

/// Splits intervals whose defect exceeds `tol`; returns `false` when the
/// mesh is already fine enough or the node budget is exhausted.
fn refine_mesh(
    col: &Collocation,
    z: &mut Vec<f64>,
    y: &mut Vec<V4>,
    defects: &[f64],
    tol: f64,
    max_nodes: usize,
) -> bool {
    // intervals this narrow lose more to cancellation than splitting gains
    let splittable = |i: usize| z[i + 1] - z[i] > 1e-9 * (1.0 + z[i].abs());
    let cuts_for = |i: usize| match defects[i] {
        d if !splittable(i) || d <= tol => 0,
        d if d > 100.0 * tol => 2,
        _ => 1,
    };
    let extra: usize = (0..defects.len()).map(cuts_for).sum();
    if extra == 0 || z.len() + extra > max_nodes {
        return false;
    }
    let fs: Vec<V4> = y.iter().map(|s| col.f(s)).collect();
    let mut nz = Vec::with_capacity(z.len() + extra);
    let mut ny = Vec::with_capacity(z.len() + extra);
    for i in 0..z.len() - 1 {
        nz.push(z[i]);
        ny.push(y[i]);
        let h = z[i + 1] - z[i];
        let cuts: &[f64] = match cuts_for(i) {
            2 => &[1.0 / 3.0, 2.0 / 3.0],
            1 => &[0.5],
            _ => &[],
        };
        for &t in cuts {
            let (p, _) = hermite(t, h, &y[i], &y[i + 1], &fs[i], &fs[i + 1]);
            nz.push(z[i] + t * h);
            ny.push(p);
        }
    }
    nz.push(z[z.len() - 1]);
    ny.push(y[y.len() - 1]);
    *z = nz;
    *y = ny;
    true
}

#[derive(Clone, Debug)]
pub struct BvpSolution {
    pub grid: Vec<f64>,
    pub states: Vec<V4>,
    pub residual: f64,
    pub refinements: usize,
    pub max_defect: f64,
}

/// Solves the truncated boundary-value problem from a guess on `grid`.
/// The phase location must be an interior node of the grid.
pub fn solve(p: &ModelParams, grid: Vec<f64>, guess: Vec<V4>, phase: Phase, cfg: &SolverConfig) -> Result<BvpSolution> {
    p.validate()?;
    if p.epsilon <= 0.0 {
        return Err(Error::SingularLimit);
    }
    if grid.len() != guess.len() || grid.len() < 3 {
        return Err(Error::InvalidParams("guess needs at least three nodes".into()));
    }
    let col = Collocation::new(p, phase.w);
    let mut z = grid;
    let mut y = guess;
    let mut refinements = 0;
    loop {
        let k = z
            .iter()
            .position(|&zz| zz == phase.z)
            .filter(|&k| k > 0 && k + 1 < z.len())
            .ok_or_else(|| Error::InvalidParams(format!("phase location {} is not an interior node", phase.z)))?;
        let residual = col.newton(&z, &mut y, k, cfg)?;
        let defects = col.defects(&z, &y);
        let max_defect = defects.iter().copied().fold(0.0, f64::max);
        if refinements >= cfg.max_refinements || !refine_mesh(&col, &mut z, &mut y, &defects, cfg.tol_mesh, cfg.max_nodes) {
            check_domain(&y, cfg)?;
            return Ok(BvpSolution { grid: z, states: y, residual, refinements, max_defect });
        }
        refinements += 1;
    }
}

/// The right end approaches the line of equilibria exponentially; its
/// distance from that line measures truncation.
fn check_domain(y: &[V4], cfg: &SolverConfig) -> Result<()> {
    let last = y[y.len() - 1];
    let residual = last[1].abs().max(last[2].abs()).max(last[3].abs());
    if residual > cfg.tol_bc {
        return Err(Error::DomainTooShort { residual, tol: cfg.tol_bc });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_rows_are_left_eigenvectors() {
        let (c, e) = (0.8, 0.01);
        let j = slow_jacobian_array(&[0.0, c, 0.0, 1.0], c, e);
        let a = c / e;
        let mus = [-a, (-a - (a * a + 4.0 / e).sqrt()) / 2.0];
        for (row, mu) in left_stable_rows(c, e).iter().zip(mus) {
            for k in 0..4 {
                let lj: f64 = (0..4).map(|i| row[i] * j[i][k]).sum();
                assert!((lj - mu * row[k]).abs() < 1e-9 * a, "{lj} vs {}", mu * row[k]);
            }
        }
    }

    #[test]
    fn right_row_is_left_null_vector() {
        let (c, e, ui) = (0.7, 0.01, 1.3);
        let j = slow_jacobian_array(&[ui, 0.0, 0.0, 0.0], c, e);
        let row = right_centre_row(c, e, ui);
        for k in 0..4 {
            let lj: f64 = (0..4).map(|i| row[i] * j[i][k]).sum();
            assert!(lj.abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_reproduces_cubics() {
        // y = t^3 componentwise on [0, 2]
        let (a, b) = ([0.0; 4], [8.0; 4]);
        let (fa, fb) = ([0.0; 4], [12.0; 4]);
        let (p, dp) = hermite(0.25, 2.0, &a, &b, &fa, &fb);
        assert!((p[0] - 0.125).abs() < 1e-14 && (dp[0] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = ModelParams::new(0.05, 0.9, 1.0).unwrap();
        let col = Collocation::new(&p, 0.5);
        let z: Vec<f64> = (0..7).map(|i| -3.0 + i as f64).collect();
        let y: Vec<V4> = z.iter().map(|&zz| [0.5 + 0.1 * zz, 0.3, 0.05 * zz, 0.5 - 0.1 * zz]).collect();
        let k = 3;
        let jm = col.jacobian(&z, &y, k);
        let r0 = col.residual(&z, &y, k);
        let h = 1e-7;
        for j in 0..4 * z.len() {
            let mut yp = y.clone();
            yp[j / 4][j % 4] += h;
            let rp = col.residual(&z, &yp, k);
            for i in 0..r0.len() {
                let fd = (rp[i] - r0[i]) / h;
                assert!((fd - jm.get(i, j)).abs() < 1e-4 * (1.0 + fd.abs()), "({i},{j}) {fd} {}", jm.get(i, j));
            }
        }
    }
}
