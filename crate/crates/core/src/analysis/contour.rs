use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::C64;

use super::{evaluate_all, Evaluator};

/// Offset keeping quarter-circle contours off `lambda = 0`.
pub const AXIS_INSET: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContourKind {
    /// First-quadrant sector of radius `r`, closed along both axes.
    QuarterCircle(f64),
    /// Axis-aligned rectangle with opposite corners `lo` and `hi`.
    Rectangle { lo: C64, hi: C64 },
    Circle { centre: C64, radius: f64 },
    /// Open path; only argument changes are meaningful.
    Segment { a: C64, b: C64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    /// Initial samples per piece.
    pub n_min: usize,
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(C64, C64),
    Arc { centre: C64, radius: f64, from: f64, to: f64 },
}

impl Piece {
    fn at(&self, t: f64) -> C64 {
        match *self {
            Piece::Line(a, b) => a + (b - a) * t,
            Piece::Arc { centre, radius, from, to } => centre + C64::from_polar(radius, from + (to - from) * t),
        }
    }
}

impl Contour {
    pub fn new(kind: ContourKind) -> Self {
        Self { kind, n_min: 32 }
    }

    pub fn quarter_circle(r: f64) -> Self {
        Self::new(ContourKind::QuarterCircle(r))
    }

    pub fn rectangle(lo: C64, hi: C64) -> Self {
        Self::new(ContourKind::Rectangle { lo, hi })
    }

    pub fn circle(centre: C64, radius: f64) -> Self {
        Self::new(ContourKind::Circle { centre, radius })
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self.kind, ContourKind::Segment { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            ContourKind::QuarterCircle(r) => r > 2.0 * AXIS_INSET && r.is_finite(),
            ContourKind::Rectangle { lo, hi } => hi.re > lo.re && hi.im > lo.im,
            ContourKind::Circle { radius, .. } => radius > 0.0 && radius.is_finite(),
            ContourKind::Segment { a, b } => a != b,
        };
        if !ok || self.n_min < 2 {
            return Err(Error::InvalidParams(format!("degenerate contour {self}")));
        }
        Ok(())
    }

    /// Counterclockwise pieces.
    fn pieces(&self) -> Vec<Piece> {
        match self.kind {
            ContourKind::QuarterCircle(r) => {
                let d = AXIS_INSET;
                let i = C64::new(0.0, 1.0);
                vec![
                    Piece::Line(C64::new(d, 0.0), C64::new(r, 0.0)),
                    Piece::Arc { centre: C64::new(0.0, 0.0), radius: r, from: 0.0, to: FRAC_PI_2 },
                    Piece::Line(i * r, i * d),
                    Piece::Line(i * d, C64::new(d, 0.0)),
                ]
            }
            ContourKind::Rectangle { lo, hi } => {
                let (a, b, c, d) = (lo, C64::new(hi.re, lo.im), hi, C64::new(lo.re, hi.im));
                vec![Piece::Line(a, b), Piece::Line(b, c), Piece::Line(c, d), Piece::Line(d, a)]
            }
            ContourKind::Circle { centre, radius } => vec![Piece::Arc { centre, radius, from: 0.0, to: TAU }],
            ContourKind::Segment { a, b } => vec![Piece::Line(a, b)],
        }
    }

    /// Whether `lambda` lies strictly inside (closed contours only).
    pub fn contains(&self, lambda: C64) -> bool {
        match self.kind {
            ContourKind::QuarterCircle(r) => {
                lambda.re > 0.0 && lambda.im > 0.0 && lambda.norm() < r && lambda.re + lambda.im > AXIS_INSET
            }
            ContourKind::Rectangle { lo, hi } => {
                lambda.re > lo.re && lambda.re < hi.re && lambda.im > lo.im && lambda.im < hi.im
            }
            ContourKind::Circle { centre, radius } => (lambda - centre).norm() < radius,
            ContourKind::Segment { .. } => false,
        }
    }
}

impl std::fmt::Display for Contour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            ContourKind::QuarterCircle(r) => write!(f, "quarter_circle(r={r})"),
            ContourKind::Rectangle { lo, hi } => write!(f, "rectangle([{}, {}] x [{}, {}])", lo.re, hi.re, lo.im, hi.im),
            ContourKind::Circle { centre, radius } => write!(f, "circle(centre={centre}, r={radius})"),
            ContourKind::Segment { a, b } => write!(f, "segment({a} -> {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingOptions {
    /// Largest accepted argument change between neighbouring samples.
    pub max_step: f64,
    /// `|E|` below this on the path counts as a zero on the contour.
    pub path_floor: f64,
    pub max_samples: usize,
    /// Largest accepted distance of `total / 2 pi` from an integer.
    pub max_residual: f64,
    /// Shortest parameter interval that may still be bisected.
    pub min_dt: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self { max_step: FRAC_PI_2, path_floor: 1e-12, max_samples: 20_000, max_residual: 0.05, min_dt: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct WindingReport {
    pub contour: Contour,
    pub label: String,
    pub winding: i64,
    /// Total argument change divided by `2 pi`.
    pub raw: f64,
    pub residual: f64,
    /// `(piece, t, lambda, E)` in path order.
    pub samples: Vec<(usize, f64, C64, C64)>,
}

impl WindingReport {
    pub fn samples_used(&self) -> usize {
        self.samples.len()
    }

    /// Structured plain-text summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "contour = {}", self.contour);
        let _ = writeln!(s, "function = {}", self.label);
        let _ = writeln!(s, "samples = {}", self.samples_used());
        let _ = writeln!(s, "winding = {}", self.winding);
        let _ = writeln!(s, "raw = {:.17e}", self.raw);
        let _ = writeln!(s, "residual = {:.17e}", self.residual);
        s
    }
}

fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

/// Adaptive argument accumulation along each piece: intervals whose
/// argument change exceeds `max_step`, or that flank a local dip in `|E|`,
/// are bisected; new midpoints are evaluated together.
fn trace_argument<E: Evaluator + ?Sized>(
    ev: &E,
    contour: &Contour,
    opts: &WindingOptions,
    exec: Exec,
) -> Result<(f64, Vec<(usize, f64, C64, C64)>)> {
    contour.validate()?;
    let pieces = contour.pieces();
    let n0 = contour.n_min;
    // (piece, t) nodes per piece, endpoints shared through piece order
    let mut nodes: Vec<Vec<(f64, C64)>> = Vec::with_capacity(pieces.len());
    let mut budget = 0usize;
    let mut pending: Vec<(usize, f64)> = Vec::new();
    for (k, _) in pieces.iter().enumerate() {
        for j in 0..=n0 {
            pending.push((k, j as f64 / n0 as f64));
        }
        nodes.push(Vec::new());
    }
    loop {
        budget += pending.len();
        if budget > opts.max_samples {
            return Err(Error::NonConvergentRefinement { budget: opts.max_samples });
        }
        let lambdas: Vec<C64> = pending.iter().map(|&(k, t)| pieces[k].at(t)).collect();
        let values = evaluate_all(ev, &lambdas, exec);
        for ((&(k, t), l), v) in pending.iter().zip(&lambdas).zip(values) {
            let v = v?;
            if !(v.norm() >= opts.path_floor) {
                return Err(Error::OnPath { lambda: *l, modulus: v.norm() });
            }
            nodes[k].push((t, v));
        }
        pending.clear();
        for (k, list) in nodes.iter_mut().enumerate() {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            // a dip in |E| means a zero close to the path, whose argument
            // swing can alias to a small principal step
            let mut dip = vec![false; list.len().saturating_sub(1)];
            for i in 1..list.len().saturating_sub(1) {
                let m = list[i].1.norm();
                if m < 0.5 * list[i - 1].1.norm().min(list[i + 1].1.norm()) {
                    dip[i - 1] = true;
                    dip[i] = true;
                }
            }
            for (i, pair) in list.windows(2).enumerate() {
                let ((t0, a), (t1, b)) = (pair[0], pair[1]);
                if dip[i] || arg_step(a, b).abs() > opts.max_step {
                    if t1 - t0 < opts.min_dt {
                        let l = pieces[k].at(0.5 * (t0 + t1));
                        return Err(Error::OnPath { lambda: l, modulus: a.norm().min(b.norm()) });
                    }
                    pending.push((k, 0.5 * (t0 + t1)));
                }
            }
        }
        if pending.is_empty() {
            break;
        }
    }
    let mut total = 0.0;
    let mut samples = Vec::new();
    for (k, list) in nodes.iter().enumerate() {
        for pair in list.windows(2) {
            total += arg_step(pair[0].1, pair[1].1);
        }
        for &(t, v) in list {
            samples.push((k, t, pieces[k].at(t), v));
        }
    }
    Ok((total, samples))
}

/// Number of zeros minus poles inside a closed contour, by the argument
/// principle.
pub fn winding_number<E: Evaluator + ?Sized>(
    ev: &E,
    contour: &Contour,
    opts: &WindingOptions,
    exec: Exec,
) -> Result<WindingReport> {
    if !contour.is_closed() {
        return Err(Error::InvalidParams(format!("winding number needs a closed contour, got {contour}")));
    }
    let (total, samples) = trace_argument(ev, contour, opts, exec)?;
    let raw = total / TAU;
    let winding = raw.round();
    let residual = (raw - winding).abs();
    if residual >= opts.max_residual {
        return Err(Error::NonIntegerWinding { residual });
    }
    Ok(WindingReport { contour: *contour, label: ev.label(), winding: winding as i64, raw, residual, samples })
}

/// Continuous argument change along any contour, in units of `pi`.
pub fn argument_change<E: Evaluator + ?Sized>(ev: &E, contour: &Contour, opts: &WindingOptions, exec: Exec) -> Result<f64> {
    Ok(trace_argument(ev, contour, opts, exec)?.0 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AnalyticFn;
    use crate::linalg::c;

    fn opts() -> WindingOptions {
        WindingOptions::default()
    }

    #[test]
    fn square_on_unit_circle_winds_twice() {
        let f = AnalyticFn(|l: C64| Ok(l * l));
        let unit = Contour::new(ContourKind::Circle { centre: c(0.0), radius: 1.0 });
        let r = winding_number(&f, &unit, &opts(), Exec::Auto).unwrap();
        assert_eq!(r.winding, 2);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn poles_count_negatively() {
        let f = AnalyticFn(|l: C64| Ok((l - C64::new(0.2, 0.1)) / ((l - C64::new(-0.3, 0.2)) * (l - c(0.5)))));
        let unit = Contour::new(ContourKind::Circle { centre: c(0.0), radius: 1.0 });
        assert_eq!(winding_number(&f, &unit, &opts(), Exec::Auto).unwrap().winding, -1);
    }

    #[test]
    fn quarter_circle_counts_first_quadrant_only() {
        let zs = [C64::new(3.0, 4.0), C64::new(3.0, -4.0), C64::new(-1.0, 1.0), C64::new(20.0, 1.0)];
        let f = AnalyticFn(move |l: C64| Ok(zs.iter().map(|z| l - z).product()));
        for (r, want) in [(10.0, 1), (30.0, 2), (1.0, 0)] {
            let w = winding_number(&f, &Contour::quarter_circle(r), &opts(), Exec::Auto).unwrap();
            assert_eq!(w.winding, want, "r = {r}");
        }
    }

    #[test]
    fn additive_over_partitions() {
        let zs = [C64::new(0.1, 0.05), C64::new(0.7, 0.6), C64::new(-0.6, -0.2)];
        let f = AnalyticFn(move |l: C64| Ok(zs.iter().map(|z| l - z).product::<C64>() * C64::new(0.0, 2.0)));
        let whole = Contour::rectangle(C64::new(-1.0, -1.0), C64::new(1.0, 1.0));
        let total = winding_number(&f, &whole, &opts(), Exec::Auto).unwrap().winding;
        let mut sum = 0;
        for (lo, hi) in [
            (C64::new(-1.0, -1.0), C64::new(0.013, 0.021)),
            (C64::new(0.013, -1.0), C64::new(1.0, 0.021)),
            (C64::new(-1.0, 0.021), C64::new(0.013, 1.0)),
            (C64::new(0.013, 0.021), C64::new(1.0, 1.0)),
        ] {
            sum += winding_number(&f, &Contour::rectangle(lo, hi), &opts(), Exec::Sequential).unwrap().winding;
        }
        assert_eq!(total, 3);
        assert_eq!(sum, total);
    }

    #[test]
    fn zero_on_path_is_reported() {
        let f = AnalyticFn(|l: C64| Ok(l - c(1.0)));
        let unit = Contour::new(ContourKind::Circle { centre: c(0.0), radius: 1.0 });
        assert!(matches!(winding_number(&f, &unit, &opts(), Exec::Auto), Err(Error::OnPath { .. })));
    }

    #[test]
    fn budget_is_enforced() {
        // a zero just inside the path forces deep bisection
        let f = AnalyticFn(|l: C64| Ok(l - c(1.0 - 1e-7)));
        let unit = Contour::new(ContourKind::Circle { centre: c(0.0), radius: 1.0 });
        let o = WindingOptions { max_samples: 40, ..opts() };
        assert!(matches!(winding_number(&f, &unit, &o, Exec::Auto), Err(Error::NonConvergentRefinement { .. })));
    }

    #[test]
    fn open_segment_rejected_for_winding() {
        let f = AnalyticFn(|l: C64| Ok(l));
        let s = Contour::new(ContourKind::Segment { a: c(1.0), b: C64::new(0.0, 1.0) });
        assert!(winding_number(&f, &s, &opts(), Exec::Auto).is_err());
        let half = argument_change(&f, &s, &opts(), Exec::Auto).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_text_has_fields() {
        let f = AnalyticFn(|l: C64| Ok(l));
        let unit = Contour::new(ContourKind::Circle { centre: c(0.0), radius: 2.0 });
        let t = winding_number(&f, &unit, &opts(), Exec::Auto).unwrap().to_text();
        assert!(t.contains("winding = 1"));
        assert!(t.contains("contour = circle"));
    }
}
