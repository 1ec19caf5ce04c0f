use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grassmann::{Chart, EvansOptions};
use crate::linalg::C64;
use crate::wave::{continue_in_c, SolverConfig, WaveProfile};

use super::roots::{newton_polish, RootOptions, RootRecord};
use super::sweep::sweep_real;
use super::RiccatiEvaluator;

#[derive(Clone, Debug)]
pub struct TrackConfig {
    pub solver: SolverConfig,
    pub chart: Chart,
    pub evans: EvansOptions,
    pub roots: RootOptions,
    pub z0: f64,
    /// Half-width of the real window re-swept when Newton loses the root.
    pub relocate_window: f64,
    pub relocate_samples: usize,
    pub exec: Exec,
}

impl TrackConfig {
    pub fn new(chart: Chart) -> Self {
        Self {
            solver: SolverConfig::default(),
            chart,
            evans: EvansOptions::default(),
            roots: RootOptions::default(),
            z0: 0.0,
            relocate_window: 0.1,
            relocate_samples: 41,
            exec: Exec::Auto,
        }
    }

    fn evaluator<'a>(&self, wave: &'a WaveProfile) -> RiccatiEvaluator<'a> {
        RiccatiEvaluator { wave, chart: self.chart.clone(), z0: self.z0, opts: self.evans }
    }
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub records: Vec<RootRecord>,
    /// Adjacent speeds between which `Re lambda*` changes sign.
    pub crossing: Option<(f64, f64)>,
}

/// Right-most real root of `E_T` on `[lo, hi]`, from a real sweep and Newton.
pub fn leading_real_root(wave: &WaveProfile, lo: f64, hi: f64, n: usize, cfg: &TrackConfig) -> Result<RootRecord> {
    let ev = cfg.evaluator(wave);
    let sweep = sweep_real(&ev, lo, hi, n, cfg.exec)?;
    let b = sweep.leading().ok_or(Error::RootLost { c: wave.params.c })?;
    let (l, res) = newton_polish(&ev, C64::new(b.root, 0.0), &cfg.roots)?;
    Ok(RootRecord { lambda: l, c: wave.params.c, residual: res, multiplicity: 1 })
}

fn polish_near(wave: &WaveProfile, guess: C64, cfg: &TrackConfig) -> Result<RootRecord> {
    let ev = cfg.evaluator(wave);
    let c = wave.params.c;
    let accept = |l: C64| (l - guess).norm() < cfg.relocate_window;
    let local = RootOptions { max_travel: cfg.relocate_window, ..cfg.roots };
    if let Ok((l, res)) = newton_polish(&ev, guess, &local) {
        if accept(l) {
            return Ok(RootRecord { lambda: l, c, residual: res, multiplicity: 1 });
        }
    }
    let (lo, hi) = (guess.re - cfg.relocate_window, guess.re + cfg.relocate_window);
    let sweep = sweep_real(&ev, lo, hi, cfg.relocate_samples, cfg.exec)?;
    let nearest = sweep
        .brackets
        .iter()
        .min_by(|a, b| {
            let da = (a.root - guess.re).abs();
            let db = (b.root - guess.re).abs();
            da.total_cmp(&db)
        })
        .ok_or(Error::RootLost { c })?;
    let (l, res) = newton_polish(&ev, C64::new(nearest.root, 0.0), &cfg.roots)
        .map_err(|_| Error::RootLost { c })?;
    Ok(RootRecord { lambda: l, c, residual: res, multiplicity: 1 })
}

/// Follows a root of `E_T` while the wave is continued from its speed to
/// `c_end` in `n_steps` equal steps.
pub fn track_root_in_c(
    start: &WaveProfile,
    c_end: f64,
    n_steps: usize,
    seed: &RootRecord,
    cfg: &TrackConfig,
) -> Result<TrackResult> {
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be at least 1".into()));
    }
    let c0 = start.params.c;
    let mut records = vec![RootRecord { c: c0, ..seed.clone() }];
    let mut wave = start.clone();
    for k in 1..=n_steps {
        let c = if k == n_steps { c_end } else { c0 + (c_end - c0) * k as f64 / n_steps as f64 };
        let path = continue_in_c(&wave, c, 1, &cfg.solver)?;
        wave = path.into_iter().last().expect("continuation returns the start");
        let prev = records.last().expect("seeded").lambda;
        records.push(polish_near(&wave, prev, cfg)?);
    }
    let crossing = records
        .windows(2)
        .find(|p| (p[0].lambda.re < 0.0) != (p[1].lambda.re < 0.0))
        .map(|p| (p[0].c.min(p[1].c), p[0].c.max(p[1].c)));
    Ok(TrackResult { records, crossing })
}
