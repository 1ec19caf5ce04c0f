use hapto_core::model::{critical_manifold_lift, jump_target};
use hapto_core::wave::*;
use hapto_core::{ModelParams, SlowState};
use proptest::prelude::*;

fn params(c: f64) -> ModelParams {
    ModelParams::new(0.01, c, 1.0).unwrap()
}

fn wave(c: f64) -> WaveProfile {
    compute_wave(&params(c), &SolverConfig::default()).unwrap()
}

/// Three-point derivative of `w` on a non-uniform grid.
fn grid_dw(w: &WaveProfile) -> Vec<f64> {
    let (z, s) = (w.grid(), w.states());
    let n = z.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (s[1].w - s[0].w) / (z[1] - z[0])
            } else if i == n - 1 {
                (s[n - 1].w - s[n - 2].w) / (z[n - 1] - z[n - 2])
            } else {
                let (h0, h1) = (z[i] - z[i - 1], z[i + 1] - z[i]);
                (-h1 / (h0 * (h0 + h1))) * s[i - 1].w
                    + ((h1 - h0) / (h0 * h1)) * s[i].w
                    + (h0 / (h1 * (h0 + h1))) * s[i + 1].w
            }
        })
        .collect()
}

/// `y - (epsilon w' - v w + c w)` at interval midpoints, with `w'` from the
/// profile's interpolant.
fn lienard_defect(w: &WaveProfile) -> f64 {
    let e = w.params.epsilon;
    let c = w.params.c;
    w.grid()
        .windows(2)
        .map(|g| {
            let (s, d) = w.eval_with_derivative(0.5 * (g[0] + g[1]));
            (s[1] - (e * d[3] - s[2] * s[3] + c * s[3])).abs()
        })
        .fold(0.0, f64::max)
}

fn boundary_gap(w: &WaveProfile) -> (f64, f64) {
    let s = w.states();
    let (l, r) = (s[0], s[s.len() - 1]);
    let right = (r.u - w.u_inf()).abs().max(r.y.abs()).max(r.v.abs()).max(r.w.abs());
    let left = l.u.abs().max((l.y - w.params.c).abs()).max(l.v.abs()).max((l.w - 1.0).abs());
    (left, right)
}

#[test]
fn converged_waves_meet_tolerances() {
    let cfg = SolverConfig::default();
    for c in [1.0, 0.8, 0.7, 0.65] {
        let w = wave(c);
        assert!(w.bvp_residual < cfg.tol_newton, "c={c} residual {}", w.bvp_residual);
        let (left, right) = boundary_gap(&w);
        assert!(right < cfg.tol_bc, "c={c} right gap {right}");
        // the left tail decays algebraically, u ~ c / |z|
        assert!(left < 2.0 * c / cfg.l_minus, "c={c} left gap {left}");
    }
}

#[test]
fn wave_types_by_speed() {
    assert_eq!(wave(1.0).wave_type, WaveType::I);
    assert_eq!(wave(0.70).wave_type, WaveType::II);
    let w = wave(0.65);
    assert_eq!(w.wave_type, WaveType::IV);
    assert!(w.min_w() < 0.0);
}

#[test]
fn lienard_consistency() {
    for c in [1.0, 0.7, 0.65] {
        let d = lienard_defect(&wave(c));
        assert!(d < 1e-6, "c={c} defect {d}");
    }
}

#[test]
fn shock_layer_satisfies_jump_conditions() {
    let cfg = SolverConfig::default();
    for c in [0.70, 0.65] {
        let w = wave(c);
        let e = w.params.epsilon;
        let dw = grid_dw(&w);
        let k = (0..dw.len()).max_by(|&a, &b| dw[a].abs().total_cmp(&dw[b].abs())).unwrap();
        let bound = cfg.kappa / e.sqrt();
        let mut lo = k;
        while lo > 0 && dw[lo].abs() > bound {
            lo -= 1;
        }
        let mut hi = k;
        while hi + 1 < dw.len() && dw[hi].abs() > bound {
            hi += 1;
        }
        let s = w.states();
        let u = s[k].u;
        let (wm, wp) = (s[lo].w, s[hi].w);
        let err = (wm + wp - c * c / (u * u)).abs();
        assert!(err < e.sqrt(), "c={c} jump sum error {err}");
        // and the singular jump map agrees at the same order
        let (vm, _) = critical_manifold_lift(u, wm, c);
        let (_, w_plus) = jump_target(u, vm, wm, c).unwrap();
        assert!((w_plus - wp).abs() < e.sqrt());
    }
}

#[test]
fn translation_invariance() {
    let cfg = SolverConfig::default();
    for c in [1.0, 0.7] {
        let w = wave(c);
        let delta = 0.37;
        let shifted = WaveProfile::new(
            w.grid().iter().map(|z| z + delta).collect(),
            w.states().to_vec(),
            w.params,
            w.wave_type,
            w.bvp_residual,
        )
        .unwrap();
        let again = refine_wave(WaveGuess::Profile(&shifted), &w.params, &cfg).unwrap();
        let diff = w
            .grid()
            .iter()
            .filter(|z| z.abs() < 40.0)
            .map(|&z| {
                let (a, b) = (w.eval_array(z), again.eval_array(z));
                (0..4).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "c={c} diff {diff}");
    }
}

#[test]
fn continuation_fast_to_shock() {
    let cfg = SolverConfig::default();
    let path = continue_in_c(&wave(1.0), 0.70, 30, &cfg).unwrap();
    assert_eq!(path.len(), 31);
    assert_eq!(path[0].wave_type, WaveType::I);
    assert_eq!(path[30].wave_type, WaveType::II);
    assert!((path[30].params.c - 0.70).abs() < 1e-12);
    // a single transition: once shocked, stays shocked
    let first_ii = path.iter().position(|w| w.wave_type == WaveType::II).unwrap();
    assert!(path[first_ii..].iter().all(|w| w.wave_type == WaveType::II));
}

#[test]
fn continuation_brackets_type_iii() {
    let cfg = SolverConfig::default();
    let path = continue_in_c(&wave(0.70), 0.65, 50, &cfg).unwrap();
    let (lo, hi) = type_iii_bracket(&path).expect("II to IV transition");
    assert!(hi - lo < 2e-3);
    assert!((lo - 0.6701).abs() < 0.02 && (hi - 0.6701).abs() < 0.02, "[{lo}, {hi}]");
}

#[test]
fn continuation_rejects_zero_steps() {
    let cfg = SolverConfig::default();
    assert!(continue_in_c(&wave(1.0), 0.9, 0, &cfg).is_err());
}

#[test]
fn negative_w_anywhere_forces_type_iv() {
    let cfg = SolverConfig::default();
    let w = wave(1.0);
    let mut states = w.states().to_vec();
    let k = states.len() / 3;
    states[k] = SlowState::new(states[k].u, states[k].y, states[k].v, -2.0 * cfg.tol_w);
    let bent = WaveProfile::new(w.grid().to_vec(), states, w.params, w.wave_type, w.bvp_residual).unwrap();
    assert_eq!(classify_wave(&bent, &cfg), WaveType::IV);
}

#[test]
fn saved_wave_round_trips() {
    let w = wave(0.7);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    w.save(&path).unwrap();
    let back = WaveProfile::load(&path).unwrap();
    assert_eq!(back.grid(), w.grid());
    assert_eq!(back.wave_type, w.wave_type);
    assert_eq!(back.to_text(), w.to_text());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solved_waves_satisfy_invariants(c in 0.66f64..1.1) {
        let cfg = SolverConfig::default();
        let w = wave(c);
        prop_assert!(w.bvp_residual < cfg.tol_newton);
        prop_assert!(w.grid().windows(2).all(|g| g[1] > g[0]));
        prop_assert!(lienard_defect(&w) < 1e-6);
        prop_assert!(boundary_gap(&w).1 < cfg.tol_bc);
    }
}
