use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::C64;

use super::contour::{winding_number, Contour, WindingOptions};
use super::{Cached, Evaluator};

#[derive(Clone, Debug, PartialEq)]
pub struct RootRecord {
    pub lambda: C64,
    pub c: f64,
    /// `|E|` at the polished root.
    pub residual: f64,
    pub multiplicity: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    /// Cells narrower than this are polished rather than split.
    pub coarse_tol: f64,
    /// Newton stops once the update is below `tol * max(1, |lambda|)`.
    pub tol: f64,
    pub residual_tol: f64,
    pub max_newton: usize,
    /// Cells narrower than this holding several zeros are reported unresolved.
    pub min_cell: f64,
    pub winding: WindingOptions,
    /// Initial samples per cell side.
    pub n_side: usize,
    /// Newton gives up once an iterate is farther than this from its start.
    pub max_travel: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            coarse_tol: 1e-2,
            tol: 1e-12,
            residual_tol: 1e-7,
            max_newton: 40,
            min_cell: 1e-6,
            winding: WindingOptions::default(),
            n_side: 8,
            max_travel: f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RootSearch {
    pub roots: Vec<RootRecord>,
    /// Centres of the smallest cells found to contain poles.
    pub poles: Vec<C64>,
    pub cells_examined: usize,
}

/// Central-difference derivative with step `1e-6 max(1, |lambda|)`.
pub fn derivative<E: Evaluator + ?Sized>(ev: &E, lambda: C64) -> Result<C64> {
    let h = 1e-6 * lambda.norm().max(1.0);
    let (a, b) = (ev.eval(lambda + h)?, ev.eval(lambda - h)?);
    Ok((a - b) / (2.0 * h))
}

/// `E q` times an exponential fitted to `q` at a reference point, which
/// keeps it analytic where `E` has poles without the growth of `q`.
struct Regular<'a, E: ?Sized> {
    ev: &'a E,
    at: C64,
    shift: C64,
    slope: C64,
}

impl<E: Evaluator + ?Sized> Evaluator for Regular<'_, E> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        let (v, lq) = self.ev.eval_with_poles(lambda)?;
        Ok(v * (lq - self.shift - self.slope * (lambda - self.at)).exp())
    }
}

/// Newton iteration on `E(lambda) = 0` from `start`, run on the pole-free
/// factor so that a nearby pole does not deflect it. The residual is `|E|`.
pub fn newton_polish<E: Evaluator + ?Sized>(ev: &E, start: C64, opts: &RootOptions) -> Result<(C64, f64)> {
    let (_, shift) = ev.eval_with_poles(start)?;
    // growth rate of q over a wide stencil; a local difference would pick
    // up 1/(lambda - r) from a zero of q at r and flatten the function
    let slope_over = |h: f64| -> Result<C64> {
        let (a, b) = (ev.eval_with_poles(start + h)?.1, ev.eval_with_poles(start - h)?.1);
        Ok((a - b) / (2.0 * h))
    };
    let scale = start.norm().max(1.0);
    let slope = slope_over(0.05 * scale).or_else(|_| slope_over(1e-6 * scale))?;
    let f = Regular { ev, at: start, shift, slope };
    let mut l = start;
    let mut e = f.eval(l)?;
    let mut converged = false;
    for _ in 0..opts.max_newton {
        let d = derivative(&f, l)?;
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let step = e / d;
        l -= step;
        if (l - start).norm() > opts.max_travel {
            break;
        }
        e = f.eval(l)?;
        if step.norm() <= opts.tol * l.norm().max(1.0) || e.norm() == 0.0 {
            converged = true;
            break;
        }
    }
    let r = ev.eval(l)?.norm();
    if converged || r < opts.residual_tol {
        Ok((l, r))
    } else {
        Err(Error::NoConvergence { iterations: opts.max_newton, best_residual: r })
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    lo: C64,
    hi: C64,
}

impl Cell {
    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    fn centre(&self) -> C64 {
        (self.lo + self.hi) * 0.5
    }

    fn contour(&self, n: usize) -> Contour {
        Contour { n_min: n, ..Contour::rectangle(self.lo, self.hi) }
    }

    /// Four children split at fractions `(fx, fy)`.
    fn split(&self, fx: f64, fy: f64) -> [Cell; 4] {
        let mx = self.lo.re + fx * (self.hi.re - self.lo.re);
        let my = self.lo.im + fy * (self.hi.im - self.lo.im);
        [
            Cell { lo: self.lo, hi: C64::new(mx, my) },
            Cell { lo: C64::new(mx, self.lo.im), hi: C64::new(self.hi.re, my) },
            Cell { lo: C64::new(self.lo.re, my), hi: C64::new(mx, self.hi.im) },
            Cell { lo: C64::new(mx, my), hi: self.hi },
        ]
    }
}

/// Split fractions tried in turn; off-centre so that cuts avoid roots on
/// symmetry lines such as the real axis.
const SPLITS: [(f64, f64); 4] = [(0.4871, 0.4937), (0.5313, 0.5209), (0.4417, 0.5623), (0.5711, 0.4389)];

/// `E q` with `|q|` dropped: winds once per zero of `E`. The phase of
/// `exp(-slope lambda)` is removed as well; it winds zero times but would
/// otherwise turn by `|slope|` radians per unit and alias the count.
struct Zeros<'a, E: ?Sized> {
    ev: &'a E,
    slope: C64,
}

impl<E: Evaluator + ?Sized> Evaluator for Zeros<'_, E> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        let (v, lq) = self.ev.eval_with_poles(lambda)?;
        Ok(v * C64::from_polar(1.0, (lq - self.slope * lambda).im))
    }
}

/// Unit factor winding once per pole of `E`.
struct Poles<'a, E: ?Sized> {
    ev: &'a E,
    slope: C64,
}

impl<E: Evaluator + ?Sized> Evaluator for Poles<'_, E> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        let (_, lq) = self.ev.eval_with_poles(lambda)?;
        Ok(C64::from_polar(1.0, (lq - self.slope * lambda).im))
    }
}

/// Zero and pole counts inside a cell. For evaluators without pole
/// information only the difference is known and a negative count is
/// taken as poles.
fn census<E: Evaluator + ?Sized>(ev: &E, slope: C64, cell: &Cell, opts: &RootOptions, exec: Exec) -> Result<(i64, i64)> {
    let contour = cell.contour(opts.n_side);
    let n = winding_number(&Zeros { ev, slope }, &contour, &opts.winding, exec)?.winding;
    let p = winding_number(&Poles { ev, slope }, &contour, &opts.winding, exec)?.winding;
    Ok(if n < 0 { (0, p - n) } else { (n, p) })
}

/// Growth rate of `ln q` across the real extent of `[lo, hi]`; zero if
/// either end cannot be evaluated.
fn pole_slope<E: Evaluator + ?Sized>(ev: &E, lo: C64, hi: C64) -> C64 {
    let mid = C64::new(0.5 * (lo.re + hi.re), 0.5 * (lo.im + hi.im));
    let h = 0.5 * (hi.re - lo.re);
    if !(h > 0.0) {
        return C64::new(0.0, 0.0);
    }
    match (ev.eval_with_poles(mid + h), ev.eval_with_poles(mid - h)) {
        (Ok((_, a)), Ok((_, b))) => (a - b) / (2.0 * h),
        _ => C64::new(0.0, 0.0),
    }
}

/// Zeros of `ev` inside the rectangle `[lo, hi]` by recursive quadrisection
/// on the argument principle, then Newton. Zeros and poles are counted
/// separately so that a nearby pole cannot hide a zero.
pub fn locate_roots<E: Evaluator + ?Sized>(
    ev: &E,
    lo: C64,
    hi: C64,
    c: f64,
    opts: &RootOptions,
    exec: Exec,
) -> Result<RootSearch> {
    let cached = Cached::new(ev);
    let root = Cell { lo, hi };
    let slope = pole_slope(&cached, lo, hi);
    let counts = census(&cached, slope, &root, opts, exec)?;
    let mut out = RootSearch::default();
    let mut stack = vec![(root, counts)];
    while let Some((cell, (n, p))) = stack.pop() {
        out.cells_examined += 1;
        if n == 0 && p == 0 {
            continue;
        }
        let d = cell.diameter();
        if d < opts.min_cell {
            match n {
                0 | 1 => {}
                _ => return Err(Error::ClusterUnresolved { winding: n, centre: cell.centre() }),
            }
        } else if d >= opts.coarse_tol || n > 1 || (n == 1 && p > 0) {
            stack.extend(split_cell(&cached, slope, cell, opts, exec)?);
            continue;
        }
        if n == 1 {
            let (l, res) = newton_polish(&cached, cell.centre(), &RootOptions { max_travel: cell.diameter(), ..*opts })?;
            out.roots.push(RootRecord { lambda: l, c, residual: res, multiplicity: 1 });
        }
        out.poles.extend(std::iter::repeat_n(cell.centre(), p as usize));
    }
    out.roots.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    dedup_roots(&mut out.roots, opts);
    Ok(out)
}

fn split_cell<E: Evaluator + ?Sized>(
    ev: &E,
    slope: C64,
    cell: Cell,
    opts: &RootOptions,
    exec: Exec,
) -> Result<Vec<(Cell, (i64, i64))>> {
    let mut last = None;
    for &(fx, fy) in &SPLITS {
        let kids = cell.split(fx, fy);
        let counts: Result<Vec<(i64, i64)>> = kids.iter().map(|k| census(ev, slope, k, opts, exec)).collect();
        match counts {
            Ok(cs) => return Ok(kids.into_iter().zip(cs).collect()),
            Err(e @ (Error::OnPath { .. } | Error::NonIntegerWinding { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one split attempted"))
}

/// Newton from neighbouring cells can land on the same root.
fn dedup_roots(roots: &mut Vec<RootRecord>, opts: &RootOptions) {
    let mut kept: Vec<RootRecord> = Vec::new();
    for r in roots.drain(..) {
        let scale = r.lambda.norm().max(1.0);
        if let Some(k) = kept.iter_mut().find(|k| (k.lambda - r.lambda).norm() < 1e3 * opts.tol * scale) {
            k.multiplicity += 1;
        } else {
            kept.push(r);
        }
    }
    *roots = kept;
}
