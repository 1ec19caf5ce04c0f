use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::C64;

use super::roots::{newton_polish, RootOptions};
use super::{EvansSample, Evaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    /// The argument turns by more than `pi / 2` between neighbouring
    /// samples; for real-valued data this is a sign change.
    SignChange,
    /// Local minimum of `|E|` far below its neighbours.
    SmallModulus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub kind: BracketKind,
    /// Newton-polished real root inside the bracket.
    pub root: f64,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub samples: Vec<EvansSample>,
    pub brackets: Vec<RootBracket>,
}

impl Sweep {
    pub fn moduli(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.value.map(|v| v.norm())).collect()
    }

    pub fn min_modulus(&self) -> f64 {
        self.moduli().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn median_modulus(&self) -> f64 {
        let mut m = self.moduli();
        if m.is_empty() {
            return f64::NAN;
        }
        m.sort_by(f64::total_cmp);
        let n = m.len();
        if n % 2 == 1 {
            m[n / 2]
        } else {
            0.5 * (m[n / 2 - 1] + m[n / 2])
        }
    }

    /// Right-most bracket.
    pub fn leading(&self) -> Option<RootBracket> {
        self.brackets.iter().copied().max_by(|a, b| a.hi.total_cmp(&b.hi))
    }
}

/// `n` equally spaced samples of `ev` on the real interval `[lo, hi]`.
/// Candidates are read off `E q` (poles removed where the evaluator knows
/// them, so a nearby pole cannot mask a zero) and confirmed by Newton
/// converging to a real root inside them; unconfirmed candidates are dropped.
pub fn sweep_real<E: Evaluator + ?Sized>(ev: &E, lo: f64, hi: f64, n: usize, exec: Exec) -> Result<Sweep> {
    if n < 2 || !(hi > lo) {
        return Err(Error::InvalidParams(format!("sweep needs n >= 2 and lo < hi (got n={n}, [{lo}, {hi}])")));
    }
    let lambdas: Vec<C64> = (0..n).map(|i| C64::new(lo + (hi - lo) * i as f64 / (n - 1) as f64, 0.0)).collect();
    let parts = exec.map(&lambdas, |&l| ev.eval_with_poles(l));
    // E q, divided by exp(a + b lambda) fitted to Re ln q: q grows
    // exponentially in lambda and would swamp any modulus minimum
    let fit: Vec<(f64, f64)> = lambdas.iter().zip(&parts).filter_map(|(l, r)| Some((l.re, r.as_ref().ok()?.1.re))).collect();
    let (a, b) = linear_fit(&fit);
    let regular: Vec<Option<C64>> = lambdas
        .iter()
        .zip(&parts)
        .map(|(l, r)| r.as_ref().ok().map(|&(v, lq)| v * (lq - a - b * l.re).exp()))
        .collect();
    let samples: Vec<EvansSample> =
        lambdas.iter().zip(parts).map(|(&l, r)| EvansSample::from_result(l, r.map(|p| p.0))).collect();
    let mut candidates = Vec::new();
    for i in 0..n - 1 {
        if let (Some(a), Some(b)) = (regular[i], regular[i + 1]) {
            if (b / a).arg().abs() > FRAC_PI_2 {
                let near = if b.norm() < a.norm() { i + 1 } else { i };
                candidates.push((lambdas[i].re, lambdas[i + 1].re, BracketKind::SignChange, lambdas[near].re));
            }
        }
    }
    // modulus minima: tangential zeros, or a turn split over two intervals
    // when a zero sits next to a sample
    for i in 1..n - 1 {
        let (Some(a), Some(b), Some(c)) = (regular[i - 1], regular[i], regular[i + 1]) else {
            continue;
        };
        let floor = a.norm().min(c.norm());
        let turn = ((b / a).arg() + (c / b).arg()).abs();
        if b.norm() < 1e-3 * floor || (b.norm() < floor && turn > FRAC_PI_2) {
            let (lo, hi) = (lambdas[i - 1].re, lambdas[i + 1].re);
            if !candidates.iter().any(|r| r.1 > lo && r.0 < hi) {
                candidates.push((lo, hi, BracketKind::SmallModulus, lambdas[i].re));
            }
        }
    }

    // Newton from the sample nearest the zero, then from the midpoint
    let confirmed = exec.map(&candidates, |&(lo, hi, kind, near)| {
        let opts = RootOptions { max_travel: 2.0 * (hi - lo), ..RootOptions::default() };
        let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
        [near, 0.5 * (lo + hi)].into_iter().find_map(|x| {
            let (l, _) = newton_polish(ev, C64::new(x, 0.0), &opts).ok()?;
            (l.im.abs() < 1e-8 * (1.0 + l.re.abs()) && l.re >= lo - slack && l.re <= hi + slack)
                .then_some(RootBracket { lo, hi, kind, root: l.re })
        })
    });
    let mut brackets: Vec<RootBracket> = confirmed.into_iter().flatten().collect();
    brackets.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(Sweep { samples, brackets })
}

/// Least-squares `y = a + b x`; `(mean, 0)` for fewer than two abscissae.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    if pts.is_empty() {
        return (0.0, 0.0);
    }
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x / n, sy + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(p, q), &(x, y)| (p + (x - mx) * (y - my), q + (x - mx) * (x - mx)));
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}
