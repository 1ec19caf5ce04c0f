//! Singular (`epsilon = 0`) travelling waves glued from reduced orbits of the
//! desingularised flow and at most one fast fibre.

use crate::error::{Error, Result};
use crate::model::{
    canard_point, critical_manifold_lift, desingularised_rhs, equilibria, fold_value, jump_target, ModelParams,
    SlowState,
};
use crate::ode::{integrate, Monitor, OdeError, OdeOptions};

use super::WaveType;

/// A reduced orbit sampled as `(z, u, w)` with `z` increasing.
#[derive(Clone, Debug)]
pub struct ReducedSegment {
    pub points: Vec<[f64; 3]>,
    /// Lies on the repelling sheet, where desingularised time runs against `z`.
    pub repelling: bool,
}

impl ReducedSegment {
    pub fn z_range(&self) -> (f64, f64) {
        (self.points[0][0], self.points[self.points.len() - 1][0])
    }

    fn at(&self, z: f64) -> (f64, f64) {
        let pts = &self.points;
        let i = pts.partition_point(|p| p[0] <= z).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        let t = if b[0] > a[0] { ((z - a[0]) / (b[0] - a[0])).clamp(0.0, 1.0) } else { 0.0 };
        (a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpRecord {
    pub z: f64,
    pub u: f64,
    pub v_minus: f64,
    pub w_minus: f64,
    pub v_plus: f64,
    pub w_plus: f64,
    pub y: f64,
}

#[derive(Clone, Debug)]
pub struct SingularComposite {
    pub segments: Vec<ReducedSegment>,
    pub jump: Option<JumpRecord>,
    pub composite_c: f64,
    pub u_inf: f64,
    pub wave_type: WaveType,
}

const SEED: f64 = 1e-7;

fn opts() -> OdeOptions {
    OdeOptions { rtol: 1e-11, atol: 1e-13, h_max: 0.02, max_steps: 5_000_000, ..OdeOptions::default() }
}

/// Integrates `(u, w, z)` in desingularised time, recording every accepted
/// step; `stop` ends the orbit early.
fn trace<S>(c: f64, start: [f64; 2], z0: f64, backward: bool, mut stop: S) -> Result<Vec<[f64; 3]>>
where
    S: FnMut(&[f64; 3]) -> bool,
{
    let mut pts = vec![[z0, start[0], start[1]]];
    let t_end = if backward { -1e5 } else { 1e5 };
    let res = integrate(
        |_, x: &[f64; 3]| {
            let (du, dw) = desingularised_rhs(x[0], x[1], c);
            [du, dw, -fold_value(x[0], x[1], c)]
        },
        0.0,
        t_end,
        [start[0], start[1], z0],
        &opts(),
        |_, x| {
            pts.push([x[2], x[0], x[1]]);
            if stop(x) {
                Monitor::Stop
            } else {
                Monitor::Continue
            }
        },
    );
    match res {
        Ok(_) | Err(OdeError::Stopped(_)) => Ok(pts),
        Err(e) => Err(e.into()),
    }
}

fn sorted_segment(mut pts: Vec<[f64; 3]>, repelling: bool) -> ReducedSegment {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    pts.dedup_by(|a, b| a[0] == b[0]);
    ReducedSegment { points: pts, repelling }
}

/// Orbit of the right equilibrium traced backwards, on the `w > 0` side
/// (`sign = 1`) or the `w < 0` side (`sign = -1`). Returns the points and
/// whether the fold was reached.
fn right_branch(c: f64, u_inf: f64, sign: f64, z_stop: f64) -> Result<(Vec<[f64; 3]>, bool)> {
    let n = (u_inf.powi(4) + 1.0).sqrt();
    let start = [u_inf - sign * SEED * u_inf * u_inf / n, sign * SEED / n];
    let mut folded = false;
    let pts = trace(c, start, 0.0, true, |x| {
        if fold_value(x[0], x[1], c) >= 0.0 {
            folded = true;
            return true;
        }
        x[2] < z_stop || x[0] < 1e-4 || x[0] > 50.0 * (1.0 + u_inf) || x[1] < -50.0
    })?;
    Ok((pts, folded))
}

fn segment_intersection(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> Option<(f64, f64)> {
    let r = [q[0] - p[0], q[1] - p[1]];
    let s = [b[0] - a[0], b[1] - a[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den == 0.0 {
        return None;
    }
    let ap = [a[0] - p[0], a[1] - p[1]];
    let t = (ap[0] * s[1] - ap[1] * s[0]) / den;
    let u = (ap[0] * r[1] - ap[1] * r[0]) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

/// Builds the singular wave for speed `c`: a single reduced orbit when the
/// right equilibrium's stable orbit reaches `(0, 1)` on the attracting
/// sheet, otherwise canard passage, one jump and a final reduced orbit.
pub fn build_singular_composite(p: &ModelParams) -> Result<SingularComposite> {
    p.validate()?;
    let (c, u_inf) = (p.c, p.u_inf);
    let z_far = p.c.max(1.0) * 400.0;

    let (plus, folded) = right_branch(c, u_inf, 1.0, -z_far)?;
    if !folded && plus.last().is_some_and(|x| x[1] < 1e-2 && x[2] > 0.9) {
        let seg = sorted_segment(plus, false);
        // phase: w = 1/2 at z = 0
        let pts = &seg.points;
        let k = pts.iter().rposition(|x| x[2] >= 0.5).unwrap_or(0).min(pts.len() - 2);
        let (a, b) = (pts[k], pts[k + 1]);
        let zh = a[0] + (0.5 - a[2]) / (b[2] - a[2]) * (b[0] - a[0]);
        let seg = ReducedSegment { points: pts.iter().map(|x| [x[0] - zh, x[1], x[2]]).collect(), repelling: false };
        return Ok(SingularComposite { segments: vec![seg], jump: None, composite_c: c, u_inf, wave_type: WaveType::I });
    }

    let (minus, _) = right_branch(c, u_inf, -1.0, -z_far)?;
    let (uh, wh) = canard_point(c);
    let canard = equilibria(c, u_inf)?[2];
    let psi = canard.eigenvectors[1];
    let side = |s: f64| [uh + s * SEED * psi[0], wh + s * SEED * psi[1]];
    let (sa, sr) = if fold_value(side(1.0)[0], side(1.0)[1], c) < 0.0 { (side(1.0), side(-1.0)) } else { (side(-1.0), side(1.0)) };

    // attracting sheet: from (0, 1) into the canard point
    let seg_a = trace(c, sa, 0.0, true, |x| x[2] < -z_far || x[0] < 1e-4)?;

    // repelling sheet, mirrored through the fast fibres onto the attracting sheet
    let targets = [&plus, &minus];
    let mirror = |u: f64, w: f64| [u, c * c / (u * u) - w];
    let mut hit: Option<(f64, f64, f64, f64)> = None;
    let mut prev: Option<[f64; 3]> = None;
    let mut fold_again = None;
    let seg_r = trace(c, sr, 0.0, true, |x| {
        if let Some(q) = prev {
            let (m0, m1) = (mirror(q[0], q[1]), mirror(x[0], x[1]));
            for tgt in targets {
                for win in tgt.windows(2) {
                    let (a, b) = ([win[0][1], win[0][2]], [win[1][1], win[1][2]]);
                    if let Some((t, _)) = segment_intersection(m0, m1, a, b) {
                        let u = q[0] + t * (x[0] - q[0]);
                        let w = q[1] + t * (x[1] - q[1]);
                        let z = q[2] + t * (x[2] - q[2]);
                        hit = Some((z, u, w, 0.0));
                        return true;
                    }
                }
            }
        }
        prev = Some(*x);
        if fold_value(x[0], x[1], c) <= 0.0 && (x[0] - uh).abs() + (x[1] - wh).abs() > 1e-4 {
            fold_again = Some((x[0], x[1]));
            return true;
        }
        x[2] > z_far || x[0] > 50.0 * (1.0 + u_inf) || x[0] < 1e-4
    })?;
    let Some((zj, uj, wm, _)) = hit else {
        let (u, w) = fold_again.unwrap_or((uh, wh));
        return Err(Error::FoldCollision { u, w });
    };
    let mut seg_r: Vec<[f64; 3]> = seg_r.into_iter().filter(|x| x[0] < zj).collect();
    seg_r.push([zj, uj, wm]);

    let (vm, _) = critical_manifold_lift(uj, wm, c);
    let (vp, wp) = jump_target(uj, vm, wm, c)?;
    let (_, yj) = critical_manifold_lift(uj, wm, c);
    let z_end = zj + z_far;
    let seg_c = trace(c, [uj, wp], zj, false, |x| x[2] > z_end || x[1].abs() < 1e-12)?;

    let wave_type = if wp.abs() < 1e-9 {
        WaveType::III
    } else if wp > 0.0 {
        WaveType::II
    } else {
        WaveType::IV
    };
    Ok(SingularComposite {
        segments: vec![sorted_segment(seg_a, false), sorted_segment(seg_r, true), sorted_segment(seg_c, false)],
        jump: Some(JumpRecord { z: zj, u: uj, v_minus: vm, w_minus: wm, v_plus: vp, w_plus: wp, y: yj }),
        composite_c: c,
        u_inf,
        wave_type,
    })
}

impl SingularComposite {
    /// `(u, w)` of the composite at `z`, with background states beyond the
    /// traced orbits.
    pub fn reduced_at(&self, z: f64) -> (f64, f64) {
        let first = &self.segments[0];
        if z <= first.z_range().0 {
            return first.at(first.z_range().0);
        }
        for seg in &self.segments {
            let (lo, hi) = seg.z_range();
            if z >= lo && z <= hi {
                return seg.at(z);
            }
        }
        let last = self.segments.last().expect("at least one segment");
        if z >= last.z_range().1 {
            let (u, _) = last.at(last.z_range().1);
            return (u, 0.0);
        }
        // between segments only at a jump
        let j = self.jump.expect("gap implies jump");
        if z < j.z {
            (j.u, j.w_minus)
        } else {
            (j.u, j.w_plus)
        }
    }

    /// Slow-system guess at `z`; the fast fibre is smoothed with its
    /// `epsilon > 0` layer profile.
    pub fn guess_at(&self, z: f64, epsilon: f64) -> SlowState {
        let c = self.composite_c;
        let (mut u, mut w) = self.reduced_at(z);
        if let Some(j) = self.jump {
            let width = epsilon / (j.u * j.u / c * (j.w_minus - j.w_plus).abs());
            if (z - j.z).abs() < 40.0 * width {
                let s = 1.0 / (1.0 + ((z - j.z) / width).exp());
                u = j.u;
                w = j.w_plus + (j.w_minus - j.w_plus) * s;
            }
        }
        let (v, y) = critical_manifold_lift(u, w, c);
        SlowState::new(u, y, v, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sheet;
    use crate::model::Sheet;

    fn params(c: f64) -> ModelParams {
        ModelParams::new(0.01, c, 1.0).unwrap()
    }

    #[test]
    fn fast_speed_gives_single_segment() {
        let s = build_singular_composite(&params(1.0)).unwrap();
        assert_eq!(s.wave_type, WaveType::I);
        assert!(s.jump.is_none());
        assert_eq!(s.segments.len(), 1);
        let (u, w) = s.reduced_at(0.0);
        assert!((w - 0.5).abs() < 1e-6 && u > 0.0 && u < 1.0);
        for x in &s.segments[0].points {
            assert_eq!(sheet(x[1], x[2], 1.0), Sheet::Attracting);
        }
    }

    #[test]
    fn shock_composites() {
        let s = build_singular_composite(&params(0.70)).unwrap();
        assert_eq!(s.wave_type, WaveType::II);
        let j = s.jump.unwrap();
        assert!(j.w_plus > 0.0);
        let s = build_singular_composite(&params(0.65)).unwrap();
        assert_eq!(s.wave_type, WaveType::IV);
        assert!(s.jump.unwrap().w_plus < 0.0);
    }

    #[test]
    fn composite_invariants() {
        for c in [0.65, 0.70, 0.74] {
            let s = build_singular_composite(&params(c)).unwrap();
            let j = s.jump.unwrap();
            let (v, w) = jump_target(j.u, j.v_minus, j.w_minus, c).unwrap();
            assert!((v - j.v_plus).abs() < 1e-8 && (w - j.w_plus).abs() < 1e-8);
            // the repelling segment ends at the jump, the last one starts at its landing point
            let r = s.segments[1].points.last().unwrap();
            assert!((r[1] - j.u).abs() < 1e-8 && (r[2] - j.w_minus).abs() < 1e-8);
            let f = s.segments[2].points[0];
            assert!((f[1] - j.u).abs() < 1e-8 && (f[2] - j.w_plus).abs() < 1e-8);
            let flags: Vec<bool> = s.segments.iter().map(|g| g.repelling).collect();
            assert_eq!(flags, vec![false, true, false]);
            for g in &s.segments {
                let mid = g.points[g.points.len() / 2];
                let want = if g.repelling { Sheet::Repelling } else { Sheet::Attracting };
                assert_eq!(sheet(mid[1], mid[2], c), want);
            }
            // y is constant across the fast fibre
            let (_, y_plus) = critical_manifold_lift(j.u, j.w_plus, c);
            assert!((y_plus - j.y).abs() < 1e-12);
        }
    }
}
