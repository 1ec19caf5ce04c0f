//! Small dense complex helpers and a banded LU factorisation for the
//! collocation Newton systems.

use nalgebra::{Matrix2, Matrix4, Matrix4x2, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat42 = Matrix4x2<C64>;
pub type Vec4 = Vector4<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[inline]
pub fn det2(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let d = det2(m);
    if d.norm() == 0.0 || !d.is_finite() {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / d)
}

/// 2-norm condition number of a 2x2 matrix from its singular values.
pub fn cond2(m: &Mat2) -> f64 {
    let fro2 = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let d = det2(m).norm();
    // s1^2 + s2^2 = fro2, s1 s2 = d
    let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
    let s1 = ((fro2 + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { d / s1 } else { 0.0 };
    if s2 == 0.0 {
        f64::INFINITY
    } else {
        s1 / s2
    }
}

pub fn upper(f: &Mat42) -> Mat2 {
    f.fixed_view::<2, 2>(0, 0).into_owned()
}

pub fn lower(f: &Mat42) -> Mat2 {
    f.fixed_view::<2, 2>(2, 0).into_owned()
}

pub fn stack(top: &Mat2, bottom: &Mat2) -> Mat42 {
    let mut f = Mat42::zeros();
    f.fixed_view_mut::<2, 2>(0, 0).copy_from(top);
    f.fixed_view_mut::<2, 2>(2, 0).copy_from(bottom);
    f
}

/// Unit-norm vector with its first non-negligible component rotated onto
/// the positive real axis.
pub fn normalize_phase(v: &Vec4) -> Vec4 {
    let n = v.norm();
    if n == 0.0 {
        return *v;
    }
    let mut out = v / c(n);
    if let Some(p) = out.iter().find(|z| z.norm() > 1e-10) {
        let rot = p.conj() / p.norm();
        out *= rot;
    }
    out
}

/// Least-squares null vector: right singular vector of the smallest singular
/// value. Returns the vector and that singular value.
pub fn null_vector(m: &Mat4) -> (Vec4, f64) {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let (k, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v = Vec4::from_iterator(vt.row(k).iter().map(|z| z.conj()));
    (normalize_phase(&v), smin)
}

/// Orthonormal basis of the column span (modified Gram-Schmidt) together with
/// the determinant of the triangular factor, so that `f = q * r`.
pub fn qr42(f: &Mat42) -> (Mat42, C64) {
    let a = f.column(0).into_owned();
    let r11 = a.norm();
    let q1 = a / c(r11);
    let b = f.column(1).into_owned();
    let r12 = q1.dotc(&b);
    let b = b - q1 * r12;
    let r22 = b.norm();
    let q2 = b / c(r22);
    let mut q = Mat42::zeros();
    q.set_column(0, &q1);
    q.set_column(1, &q2);
    (q, c(r11 * r22))
}

/// Sine of the largest principal angle between two column spans.
pub fn subspace_sin(a: &Mat42, b: &Mat42) -> f64 {
    let (qa, _) = qr42(a);
    let (qb, _) = qr42(b);
    let resid = qb - qa * (qa.adjoint() * qb);
    resid.svd(false, false).singular_values.max()
}

/// Banded matrix with a fixed lower/upper bandwidth. Rows keep their own
/// column window so partial pivoting can swap them freely.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    rows: Vec<BandRow>,
}

#[derive(Clone, Debug)]
struct BandRow {
    start: usize,
    vals: Vec<f64>,
}

impl BandRow {
    fn get(&self, j: usize) -> f64 {
        if j < self.start {
            return 0.0;
        }
        self.vals.get(j - self.start).copied().unwrap_or(0.0)
    }

    fn cover(&mut self, end: usize) {
        if end > self.start + self.vals.len() {
            self.vals.resize(end - self.start, 0.0);
        }
    }

    fn end(&self) -> usize {
        self.start + self.vals.len()
    }
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let start = i.saturating_sub(kl);
                let end = (i + ku + 1).min(n);
                BandRow { start, vals: vec![0.0; end - start] }
            })
            .collect();
        Self { n, kl, ku, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `v` at `(i, j)`; panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let row = &mut self.rows[i];
        row.vals[j - row.start] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i].get(j)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.vals.iter().zip(&x[r.start..]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// LU factorisation with partial pivoting. Returns `None` when a pivot
    /// vanishes.
    pub fn factor(mut self) -> Option<BandLu> {
        let n = self.n;
        let mut steps = Vec::with_capacity(n);
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.rows[k].get(k).abs();
            for r in k + 1..=last {
                let v = self.rows[r].get(k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            self.rows.swap(k, p);
            let pivot_row = self.rows[k].clone();
            let piv = pivot_row.get(k);
            let mut mults = Vec::new();
            for r in k + 1..=last {
                let a = self.rows[r].get(k);
                if a == 0.0 {
                    continue;
                }
                let m = a / piv;
                let row = &mut self.rows[r];
                row.cover(pivot_row.end());
                for j in k..pivot_row.end() {
                    row.vals[j - row.start] -= m * pivot_row.vals[j - pivot_row.start];
                }
                mults.push((r, m));
            }
            steps.push((p, mults));
        }
        Some(BandLu { rows: self.rows, steps })
    }
}

#[derive(Clone, Debug)]
pub struct BandLu {
    rows: Vec<BandRow>,
    steps: Vec<(usize, Vec<(usize, f64)>)>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.rows.len();
        let mut y = b.to_vec();
        for (k, (p, mults)) in self.steps.iter().enumerate() {
            y.swap(k, *p);
            let yk = y[k];
            for &(r, m) in mults {
                y[r] -= m * yk;
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let row = &self.rows[k];
            let mut s = y[k];
            for j in k + 1..row.end().min(n) {
                s -= row.vals[j - row.start] * x[j];
            }
            x[k] = s / row.get(k);
        }
        x
    }
}
