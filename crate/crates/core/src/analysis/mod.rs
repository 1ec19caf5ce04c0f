//! Eigenvalue detection from the Riccati-Evans function: real-line sweeps,
//! argument-principle winding numbers, root location and tracking in `c`.

mod contour;
mod field;
mod roots;
mod sweep;
mod track;

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::Result;
use crate::exec::Exec;
use crate::grassmann::{direct_evans_oracle, riccati_evans_detail, Chart, EvansOptions};
use crate::linalg::C64;
use crate::wave::WaveProfile;

pub use contour::{argument_change, winding_number, Contour, ContourKind, WindingOptions, WindingReport};
pub use field::{argument_field, ArgumentField};
pub use roots::{locate_roots, newton_polish, RootOptions, RootRecord, RootSearch};
pub use sweep::{sweep_real, BracketKind, RootBracket, Sweep};
pub use track::{leading_real_root, track_root_in_c, TrackConfig, TrackResult};

/// A complex function of `lambda` whose zeros are sought.
pub trait Evaluator: Sync {
    fn eval(&self, lambda: C64) -> Result<C64>;

    /// The value together with `ln q` for an analytic factor `q` such that
    /// `E q` has no poles. Without pole information `ln q = 0`.
    fn eval_with_poles(&self, lambda: C64) -> Result<(C64, C64)> {
        Ok((self.eval(lambda)?, C64::new(0.0, 0.0)))
    }

    fn label(&self) -> String {
        String::new()
    }
}

/// The Riccati-Evans function `E_T(z0; lambda)` of one wave in one chart.
#[derive(Clone, Debug)]
pub struct RiccatiEvaluator<'a> {
    pub wave: &'a WaveProfile,
    pub chart: Chart,
    pub z0: f64,
    pub opts: EvansOptions,
}

impl<'a> RiccatiEvaluator<'a> {
    pub fn new(wave: &'a WaveProfile, chart: Chart) -> Self {
        Self { wave, chart, z0: 0.0, opts: EvansOptions::default() }
    }
}

impl Evaluator for RiccatiEvaluator<'_> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        self.eval_with_poles(lambda).map(|p| p.0)
    }

    fn eval_with_poles(&self, lambda: C64) -> Result<(C64, C64)> {
        let d = riccati_evans_detail(lambda, self.wave, &self.chart, self.z0, &self.opts)?;
        Ok((d.value, d.log_det_x))
    }

    fn label(&self) -> String {
        self.chart.label.clone()
    }
}

/// Evans function from the linear flow of orthonormalised frames. Without a
/// chart this is `D` divided by its logged positive scale, which keeps the
/// zero set and the sign of `D` on the real line but is not analytic in
/// `lambda`; with a chart it is `E_T` recovered from the frames.
#[derive(Clone, Debug)]
pub struct OracleEvaluator<'a> {
    pub wave: &'a WaveProfile,
    pub chart: Option<Chart>,
    pub z0: f64,
    pub opts: EvansOptions,
}

impl<'a> OracleEvaluator<'a> {
    pub fn new(wave: &'a WaveProfile) -> Self {
        Self { wave, chart: None, z0: 0.0, opts: EvansOptions::default() }
    }
}

impl Evaluator for OracleEvaluator<'_> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        let o = direct_evans_oracle(lambda, self.wave, self.z0, &self.opts)?;
        match &self.chart {
            Some(ch) => o.chart_value(ch),
            None => Ok(o.det_q),
        }
    }

    fn label(&self) -> String {
        match &self.chart {
            Some(ch) => format!("oracle/{}", ch.label),
            None => "oracle".into(),
        }
    }
}

/// Wraps a closure, for analytic test functions.
pub struct AnalyticFn<F>(pub F);

impl<F> Evaluator for AnalyticFn<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    fn eval(&self, lambda: C64) -> Result<C64> {
        (self.0)(lambda)
    }

    fn label(&self) -> String {
        "analytic".into()
    }
}

/// Memoises successful evaluations; shared cell edges are sampled once.
pub struct Cached<'e, E: ?Sized> {
    inner: &'e E,
    memo: Mutex<HashMap<(u64, u64), (C64, C64)>>,
}

impl<'e, E: Evaluator + ?Sized> Cached<'e, E> {
    pub fn new(inner: &'e E) -> Self {
        Self { inner, memo: Mutex::new(HashMap::new()) }
    }

    pub fn len(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Cached<'_, E> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        self.eval_with_poles(lambda).map(|p| p.0)
    }

    fn eval_with_poles(&self, lambda: C64) -> Result<(C64, C64)> {
        let key = (lambda.re.to_bits(), lambda.im.to_bits());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = self.inner.eval_with_poles(lambda)?;
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    fn label(&self) -> String {
        self.inner.label()
    }
}

/// One evaluation; failures are kept as a status string.
#[derive(Clone, Debug, PartialEq)]
pub struct EvansSample {
    pub lambda: C64,
    pub value: Option<C64>,
    pub status: String,
}

impl EvansSample {
    pub(crate) fn from_result(lambda: C64, r: Result<C64>) -> Self {
        match r {
            Ok(v) => Self { lambda, value: Some(v), status: "ok".into() },
            Err(e) => Self { lambda, value: None, status: e.to_string().replace(',', ";") },
        }
    }
}

pub fn evaluate_all<E: Evaluator + ?Sized>(ev: &E, lambdas: &[C64], exec: Exec) -> Vec<Result<C64>> {
    exec.map(lambdas, |&l| ev.eval(l))
}

pub fn sample_all<E: Evaluator + ?Sized>(ev: &E, lambdas: &[C64], exec: Exec) -> Vec<EvansSample> {
    lambdas.iter().zip(evaluate_all(ev, lambdas, exec)).map(|(&l, r)| EvansSample::from_result(l, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn cache_returns_same_values() {
        let f = AnalyticFn(|l: C64| Ok(l * l - c(1.0)));
        let cached = Cached::new(&f);
        let ls: Vec<C64> = (0..10).map(|k| C64::new(k as f64 * 0.1, 0.3)).collect();
        let a = evaluate_all(&cached, &ls, Exec::Auto);
        let b = evaluate_all(&cached, &ls, Exec::Sequential);
        assert_eq!(cached.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.as_ref().unwrap(), y.as_ref().unwrap());
        }
    }
}
