use crate::error::{Error, Result};
use crate::model::{canard_point, ModelParams, SlowState};

use super::bvp::{solve, Phase, SolverConfig};
use super::singular::{build_singular_composite, SingularComposite};
use super::{WaveProfile, WaveType};

/// Starting point for a collocation solve.
#[derive(Clone, Copy, Debug)]
pub enum WaveGuess<'a> {
    Singular(&'a SingularComposite),
    Profile(&'a WaveProfile),
}

impl<'a> From<&'a SingularComposite> for WaveGuess<'a> {
    fn from(s: &'a SingularComposite) -> Self {
        WaveGuess::Singular(s)
    }
}

impl<'a> From<&'a WaveProfile> for WaveGuess<'a> {
    fn from(w: &'a WaveProfile) -> Self {
        WaveGuess::Profile(w)
    }
}

/// `w(0)` target: `1/2` for smooth fronts, the canard height for shocks.
pub fn phase_target(c: f64, wave_type: WaveType) -> f64 {
    match wave_type {
        WaveType::I => 0.5,
        _ => canard_point(c).1,
    }
}

pub fn classify_wave(wave: &WaveProfile, cfg: &SolverConfig) -> WaveType {
    if wave.min_w() < -cfg.tol_w {
        WaveType::IV
    } else if wave.max_abs_dw() > cfg.kappa / wave.params.epsilon.sqrt() {
        WaveType::II
    } else {
        WaveType::I
    }
}

/// Adjacent speeds on a continuation path between which the type changes
/// from II to IV; the type III wave lies in between.
pub fn type_iii_bracket(path: &[WaveProfile]) -> Option<(f64, f64)> {
    path.windows(2).find_map(|pair| {
        let (a, b) = (&pair[0], &pair[1]);
        let types = (a.wave_type, b.wave_type);
        matches!(types, (WaveType::II, WaveType::IV) | (WaveType::IV, WaveType::II))
            .then(|| (a.params.c.min(b.params.c), a.params.c.max(b.params.c)))
    })
}

/// Mesh on `[-l_minus, l_plus]` with spacing `h`, graded down to
/// `width / 10` at each `(centre, width)`; always contains `0`.
fn graded_mesh(cfg: &SolverConfig, centres: &[(f64, f64)], h: f64) -> Vec<f64> {
    let spacing = |z: f64| {
        centres.iter().fold(h, |m, &(zc, width)| {
            let d = (z - zc).abs() / width;
            m.min(h.min(width * 0.1 * (1.0 + d * d)))
        })
    };
    let mut out = vec![0.0];
    let mut z = 0.0;
    while z < cfg.l_plus {
        let s = spacing(z);
        z = if z + 1.5 * s >= cfg.l_plus { cfg.l_plus } else { z + s };
        out.push(z);
    }
    let mut z = 0.0;
    let mut left = Vec::new();
    while z > -cfg.l_minus {
        let s = spacing(z);
        z = if z - 1.5 * s <= -cfg.l_minus { -cfg.l_minus } else { z - s };
        left.push(z);
    }
    left.reverse();
    left.extend(out);
    left
}

fn first_crossing(grid: &[f64], w: impl Fn(usize) -> f64, target: f64) -> Option<f64> {
    (0..grid.len() - 1).find_map(|i| {
        let (a, b) = (w(i) - target, w(i + 1) - target);
        (a >= 0.0 && b < 0.0).then(|| grid[i] + a / (a - b) * (grid[i + 1] - grid[i]))
    })
}

/// Guess sampled on the solver mesh, translated so the phase point is `z = 0`.
fn prepare(guess: WaveGuess<'_>, p: &ModelParams, cfg: &SolverConfig) -> Result<(Vec<f64>, Vec<[f64; 4]>, Phase)> {
    match guess {
        WaveGuess::Singular(s) => {
            let target = phase_target(p.c, s.wave_type);
            let mut centres = vec![(0.0, 1.0)];
            if let Some(j) = s.jump {
                let width = p.epsilon / (j.u * j.u / p.c * (j.w_minus - j.w_plus).abs());
                centres.push((j.z, width));
            }
            let grid = graded_mesh(cfg, &centres, 0.05);
            let states = grid.iter().map(|&z| s.guess_at(z, p.epsilon).to_array()).collect();
            Ok((grid, states, Phase { z: 0.0, w: target }))
        }
        WaveGuess::Profile(w) => {
            let target = phase_target(p.c, w.wave_type);
            let g = w.grid();
            let shift = first_crossing(g, |i| w.states()[i].w, target)
                .ok_or_else(|| Error::InvalidParams(format!("guess never crosses w = {target}")))?;
            let mut grid: Vec<f64> =
                g.iter().map(|z| z - shift).filter(|&z| z > -cfg.l_minus && z < cfg.l_plus && z != 0.0).collect();
            let k = grid.partition_point(|&z| z < 0.0);
            grid.insert(k, 0.0);
            grid.insert(0, -cfg.l_minus);
            grid.push(cfg.l_plus);
            let (lo, hi) = (w.z_min(), w.z_max());
            let states = grid.iter().map(|&z| w.eval_array((z + shift).clamp(lo, hi))).collect();
            Ok((grid, states, Phase { z: 0.0, w: target }))
        }
    }
}

/// Collocation solve of the `epsilon > 0` wave from a singular composite or
/// a nearby profile.
pub fn refine_wave(guess: WaveGuess<'_>, p: &ModelParams, cfg: &SolverConfig) -> Result<WaveProfile> {
    p.validate()?;
    if p.epsilon <= 0.0 {
        return Err(Error::SingularLimit);
    }
    let (grid, states, phase) = prepare(guess, p, cfg)?;
    let sol = solve(p, grid, states, phase, cfg)?;
    let states = sol.states.into_iter().map(SlowState::from_array).collect();
    let mut wave = WaveProfile::new(sol.grid, states, *p, WaveType::I, sol.residual)?;
    wave.wave_type = classify_wave(&wave, cfg);
    Ok(wave)
}

/// Natural-parameter continuation in `c`. The first element is `start`.
pub fn continue_in_c(start: &WaveProfile, c_target: f64, n_steps: usize, cfg: &SolverConfig) -> Result<Vec<WaveProfile>> {
    continue_with(start, c_target, n_steps, cfg, |_| {})
}

/// As [`continue_in_c`], reporting each converged profile as it arrives.
pub fn continue_with<F>(
    start: &WaveProfile,
    c_target: f64,
    n_steps: usize,
    cfg: &SolverConfig,
    mut on_step: F,
) -> Result<Vec<WaveProfile>>
where
    F: FnMut(&WaveProfile),
{
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be at least 1".into()));
    }
    let c0 = start.params.c;
    let mut out = vec![start.clone()];
    if c_target == c0 {
        return Ok(out);
    }
    let full = (c_target - c0) / n_steps as f64;
    let min_step = full.abs() / 64.0;
    let mut step = full;
    while out.last().unwrap().params.c != c_target {
        let prev = out.last().unwrap();
        let c_prev = prev.params.c;
        let c_next = if (c_target - c_prev).abs() <= step.abs() * (1.0 + 1e-9) { c_target } else { c_prev + step };
        let p = prev.params.with_c(c_next);
        match refine_wave(WaveGuess::Profile(prev), &p, cfg) {
            Ok(w) => {
                on_step(&w);
                out.push(w);
                step = (2.0 * step).clamp(-full.abs(), full.abs());
            }
            Err(e) if e.is_numerical() => {
                step *= 0.5;
                if step.abs() < min_step {
                    return Err(Error::ContinuationStuck { last_c: c_prev });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Wave for `p`: refined singular composite, or continuation from `c = 1`
/// when Newton cannot start from the composite.
pub fn compute_wave(p: &ModelParams, cfg: &SolverConfig) -> Result<WaveProfile> {
    let direct = build_singular_composite(p).and_then(|s| refine_wave(WaveGuess::Singular(&s), p, cfg));
    match direct {
        Ok(w) => Ok(w),
        Err(e) if e.is_numerical() && p.c != 1.0 => {
            let p1 = p.with_c(1.0);
            let s = build_singular_composite(&p1)?;
            let start = refine_wave(WaveGuess::Singular(&s), &p1, cfg)?;
            let steps = ((p.c - 1.0).abs() / 0.01).ceil().max(1.0) as usize;
            let mut path = continue_in_c(&start, p.c, steps, cfg)?;
            Ok(path.pop().expect("continuation returns at least the start"))
        }
        Err(e) => Err(e),
    }
}
