//! Minimal deterministic SVG line plots and phase portraits.

use std::f64::consts::PI;
use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 460.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Dots,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Line }
    }

    pub fn dots(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Dots }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Vertical markers with captions.
    pub vlines: Vec<(f64, String)>,
    /// Draw `y = 0` when it is in range.
    pub zero_line: bool,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.1e}")
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi > lo {
        let p = 0.04 * (hi - lo);
        (lo - p, hi + p)
    } else {
        let p = 0.5 * lo.abs().max(1.0);
        (lo - p, hi + p)
    }
}

fn axes(s: &mut String, f: &Frame, title: &str, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##, r - l, b - t);
    for x in nice_ticks(f.x0, f.x1, 6) {
        let p = f.px(x);
        let _ = writeln!(s, r##"<line x1="{p:.2}" y1="{b:.2}" x2="{p:.2}" y2="{:.2}" stroke="#000"/>"##, b + 5.0);
        let _ = writeln!(s, r#"<text x="{p:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, b + 19.0, tick_label(x));
    }
    for y in nice_ticks(f.y0, f.y1, 6) {
        let p = f.py(y);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{p:.2}" x2="{l:.2}" y2="{p:.2}" stroke="#000"/>"##, l - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, l - 8.0, p + 4.0, tick_label(y));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, (l + r) / 2.0, esc(title));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 14.0, esc(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        esc(y_label)
    );
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
    )
}

impl Plot {
    pub fn render(&self) -> String {
        let finite = |v: &f64| v.is_finite();
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(finite);
        let xs: Vec<f64> = xs.chain(self.vlines.iter().map(|v| v.0).filter(finite)).collect();
        let ys: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).filter(finite).collect();
        let (x0, x1) = padded(xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let (y0, y1) = padded(ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let f = Frame { x0, x1, y0, y1 };
        let mut s = header();
        axes(&mut s, &f, &self.title, &self.x_label, &self.y_label);
        if self.zero_line && y0 < 0.0 && y1 > 0.0 {
            let p = f.py(0.0);
            let _ = writeln!(s, r##"<line x1="{LEFT:.2}" y1="{p:.2}" x2="{:.2}" y2="{p:.2}" stroke="#999" stroke-dasharray="4 3"/>"##, W - RIGHT);
        }
        for (x, label) in &self.vlines {
            if x.is_finite() {
                let p = f.px(*x);
                let _ = writeln!(s, r##"<line x1="{p:.2}" y1="{TOP:.2}" x2="{p:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="6 3"/>"##, H - BOTTOM);
                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, p + 4.0, TOP + 14.0, esc(label));
            }
        }
        for (k, ser) in self.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            match ser.style {
                Style::Line => {
                    // split at non-finite points
                    let mut d = String::new();
                    let mut pen_down = false;
                    for &(x, y) in &ser.points {
                        if x.is_finite() && y.is_finite() {
                            let _ = write!(d, "{}{:.2} {:.2} ", if pen_down { "L" } else { "M" }, f.px(x), f.py(y));
                            pen_down = true;
                        } else {
                            pen_down = false;
                        }
                    }
                    if !d.is_empty() {
                        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, d.trim_end());
                    }
                }
                Style::Dots => {
                    for &(x, y) in ser.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, f.px(x), f.py(y));
                    }
                }
            }
            let ly = TOP + 16.0 + 18.0 * k as f64;
            let lx = W - RIGHT + 12.0;
            let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="3"/>"#, ly - 4.0, lx + 18.0, ly - 4.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 24.0, esc(&ser.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Colour wheel for an argument in `(-pi, pi]`.
fn hue_rgb(arg: f64) -> (u8, u8, u8) {
    let h = (arg + PI) / (2.0 * PI) * 6.0;
    let x = 1.0 - ((h % 2.0) - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |v: f64| (55.0 + 200.0 * v).round() as u8;
    (q(r), q(g), q(b))
}

/// Cells coloured by `Arg E` on a regular grid; failed samples are grey.
/// Zeros and poles show as points where all colours meet.
pub fn phase_portrait(
    title: &str,
    xs: &[f64],
    ys: &[f64],
    arg: impl Fn(usize, usize) -> Option<f64>,
    marks: &[(f64, f64)],
) -> String {
    let (x0, x1) = padded(xs[0], xs[xs.len() - 1]);
    let (y0, y1) = padded(ys[0], ys[ys.len() - 1]);
    let f = Frame { x0, x1, y0, y1 };
    let mut s = header();
    let half = |v: &[f64], i: usize| -> (f64, f64) {
        let lo = if i == 0 { v[0] - 0.5 * v.get(1).map_or(1.0, |n| n - v[0]) } else { 0.5 * (v[i - 1] + v[i]) };
        let n = v.len();
        let hi = if i == n - 1 { v[n - 1] + 0.5 * if n > 1 { v[n - 1] - v[n - 2] } else { 1.0 } } else { 0.5 * (v[i] + v[i + 1]) };
        (lo.max(if n > 1 { v[0] } else { lo }), hi.min(if n > 1 { v[n - 1] } else { hi }))
    };
    for j in 0..ys.len() {
        let (ya, yb) = half(ys, j);
        for i in 0..xs.len() {
            let (xa, xb) = half(xs, i);
            let fill = match arg(i, j) {
                Some(a) => {
                    let (r, g, b) = hue_rgb(a);
                    format!("#{r:02x}{g:02x}{b:02x}")
                }
                None => "#bbbbbb".into(),
            };
            let (px, py) = (f.px(xa), f.py(yb));
            let _ = writeln!(
                s,
                r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                (f.px(xb) - px).max(0.5),
                (f.py(ya) - py).max(0.5)
            );
        }
    }
    for &(x, y) in marks {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#000" stroke-width="2"/>"##, f.px(x), f.py(y));
    }
    axes(&mut s, &f, title, "Re lambda", "Im lambda");
    // colour key
    let lx = W - RIGHT + 20.0;
    for k in 0..12 {
        let a = -PI + (k as f64 + 0.5) * PI / 6.0;
        let (r, g, b) = hue_rgb(a);
        let _ = writeln!(s, r##"<rect x="{lx:.2}" y="{:.2}" width="18" height="14" fill="#{r:02x}{g:02x}{b:02x}"/>"##, TOP + 14.0 * k as f64);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">arg = -pi</text>"#, lx + 24.0, TOP + 11.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">arg = pi</text>"#, lx + 24.0, TOP + 14.0 * 11.0 + 11.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_numbers() {
        assert_eq!(nice_ticks(0.0, 20.0, 5), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(nice_ticks(-0.5, 0.5, 5), [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k: f64| k * 0.2).to_vec());
        assert_eq!(nice_ticks(1.0, 1.0, 5), vec![1.0]);
    }

    #[test]
    fn render_is_deterministic_and_skips_gaps() {
        let p = Plot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series::line("s", vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0), (3.0, 2.0)]),
                Series::dots("d", vec![(1.0, 1.0)]),
            ],
            vlines: vec![(1.5, "edge".into())],
            zero_line: true,
        };
        let a = p.render();
        assert_eq!(a, p.render());
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("a &lt; b"));
        assert_eq!(a.matches("<path").count(), 1);
        assert_eq!(a.matches(" M").count() + a.matches("\"M").count(), 2);
    }

    #[test]
    fn portrait_has_one_cell_per_sample() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 1.0];
        let s = phase_portrait("t", &xs, &ys, |i, j| if i == 1 && j == 1 { None } else { Some(i as f64 - 1.0) }, &[]);
        assert_eq!(s.matches("<rect").count(), 1 + 6 + 1 + 12);
        assert!(s.contains("#bbbbbb"));
    }
}
