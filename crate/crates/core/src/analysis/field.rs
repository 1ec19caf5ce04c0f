use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::C64;

use super::{sample_all, EvansSample, Evaluator};

/// Principal argument of `E` on a regular grid, row-major in `y`.
#[derive(Clone, Debug)]
pub struct ArgumentField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub samples: Vec<EvansSample>,
}

impl ArgumentField {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn arg(&self, i: usize, j: usize) -> Option<f64> {
        self.samples[j * self.nx() + i].value.map(|v| v.arg())
    }

    /// Grid cells around which the sampled argument winds: the places where
    /// contour lines of `Arg E` coalesce. Returns cell centres and windings.
    pub fn coalescence_points(&self) -> Vec<(C64, i64)> {
        let mut out = Vec::new();
        if self.nx() < 2 || self.ny() < 2 {
            return out;
        }
        let wrap = |d: f64| (d + PI).rem_euclid(TAU) - PI;
        for j in 0..self.ny() - 1 {
            for i in 0..self.nx() - 1 {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let args: Option<Vec<f64>> = corners.iter().map(|&(a, b)| self.arg(a, b)).collect();
                let Some(args) = args else { continue };
                let total: f64 = (0..4).map(|k| wrap(args[(k + 1) % 4] - args[k])).sum();
                let w = (total / TAU).round() as i64;
                if w != 0 {
                    let centre = C64::new(0.5 * (self.xs[i] + self.xs[i + 1]), 0.5 * (self.ys[j] + self.ys[j + 1]));
                    out.push((centre, w));
                }
            }
        }
        out
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Samples `ev` on an `nx` by `ny` grid over the rectangle `[lo, hi]`; a
/// single sample along an axis sits at the midpoint.
pub fn argument_field<E: Evaluator + ?Sized>(
    ev: &E,
    lo: C64,
    hi: C64,
    nx: usize,
    ny: usize,
    exec: Exec,
) -> Result<ArgumentField> {
    if nx == 0 || ny == 0 || !(hi.re >= lo.re && hi.im >= lo.im) {
        return Err(Error::InvalidParams(format!("argument field needs a non-empty grid (got {nx} x {ny})")));
    }
    let xs = axis(lo.re, hi.re, nx);
    let ys = axis(lo.im, hi.im, ny);
    let lambdas: Vec<C64> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y))).collect();
    let samples = sample_all(ev, &lambdas, exec);
    Ok(ArgumentField { xs, ys, samples })
}
