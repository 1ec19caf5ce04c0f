use std::sync::OnceLock;

use hapto_core::analysis::*;
use hapto_core::grassmann::*;
use hapto_core::linalg::{c, C64};
use hapto_core::wave::*;
use hapto_core::{Exec, ModelParams};

fn wave(c: f64) -> &'static WaveProfile {
    static W100: OnceLock<WaveProfile> = OnceLock::new();
    static W070: OnceLock<WaveProfile> = OnceLock::new();
    static W065: OnceLock<WaveProfile> = OnceLock::new();
    let cell = match c {
        1.0 => &W100,
        0.70 => &W070,
        0.65 => &W065,
        _ => panic!("no cached wave for c = {c}"),
    };
    cell.get_or_init(|| compute_wave(&ModelParams::new(0.01, c, 1.0).unwrap(), &SolverConfig::default()).unwrap())
}

fn triangular(w: &WaveProfile) -> RiccatiEvaluator<'_> {
    RiccatiEvaluator::new(w, default_chart())
}

/// Real root at c = 0.65, polished once.
fn unstable_root() -> f64 {
    static R: OnceLock<f64> = OnceLock::new();
    *R.get_or_init(|| {
        let (l, _) = newton_polish(&triangular(wave(0.65)), c(0.024), &RootOptions::default()).unwrap();
        l.re
    })
}

#[test]
fn identity_chart_is_conjugate_symmetric() {
    let w = wave(1.0);
    let ev = RiccatiEvaluator::new(w, Chart::identity());
    for l in [C64::new(0.3, 0.2), C64::new(2.0, -1.0), C64::new(7.5, 4.0)] {
        let (a, b) = (ev.eval(l).unwrap(), ev.eval(l.conj()).unwrap());
        assert!((a - b.conj()).norm() < 1e-8 * a.norm(), "{l}: {a} vs {b}");
    }
}

#[test]
fn triangular_chart_conjugates_to_the_conjugate_chart() {
    let w = wave(1.0);
    let t = default_chart();
    let tbar = Chart::new(t.t.map(|z| z.conj()), "conj").unwrap();
    let (e, ebar) = (RiccatiEvaluator::new(w, t), RiccatiEvaluator::new(w, tbar));
    for l in [C64::new(0.3, 0.2), C64::new(2.0, -1.0)] {
        let (a, b) = (e.eval(l.conj()).unwrap(), ebar.eval(l).unwrap());
        assert!((a - b.conj()).norm() < 1e-8 * a.norm(), "{l}: {a} vs {b}");
    }
}

#[test]
fn type_one_real_sweep_has_no_roots() {
    let s = sweep_real(&triangular(wave(1.0)), 0.0, 20.0, 201, Exec::Auto).unwrap();
    assert!(s.samples.iter().all(|x| x.value.is_some()));
    assert!(s.brackets.is_empty(), "{:?}", s.brackets);
    assert!(s.min_modulus() > 1e-3 * s.median_modulus());
}

#[test]
fn type_one_quarter_circles_do_not_wind() {
    let ev = triangular(wave(1.0));
    for r in [10.0, 1e4] {
        let rep = winding_number(&ev, &Contour::quarter_circle(r), &WindingOptions::default(), Exec::Auto).unwrap();
        assert_eq!(rep.winding, 0, "r = {r}");
        assert!(rep.residual < 0.05);
    }
}

#[test]
fn leading_root_changes_sign_between_speeds() {
    let a = sweep_real(&triangular(wave(0.70)), -0.5, 0.5, 101, Exec::Auto).unwrap().leading().unwrap();
    let b = sweep_real(&triangular(wave(0.65)), -0.5, 0.5, 101, Exec::Auto).unwrap().leading().unwrap();
    assert!(a.hi < 0.0 && a.root < 0.0, "{a:?}");
    assert!(b.lo > 0.0 && b.root > 0.0, "{b:?}");
}

#[test]
fn oracle_and_riccati_share_real_zeros() {
    let w = wave(0.65);
    let ric = sweep_real(&triangular(w), -0.5, 2.0, 51, Exec::Auto).unwrap();
    let ora = sweep_real(&OracleEvaluator::new(w), -0.5, 2.0, 51, Exec::Auto).unwrap();
    assert!(!ric.brackets.is_empty());
    assert_eq!(ric.brackets.len(), ora.brackets.len(), "{:?} vs {:?}", ric.brackets, ora.brackets);
    for (a, b) in ric.brackets.iter().zip(&ora.brackets) {
        assert!((a.root - b.root).abs() < 1e-4, "{a:?} vs {b:?}");
    }
}

#[test]
fn oracle_factorises_into_chart_value() {
    let w = wave(0.65);
    let chart = default_chart();
    let opts = EvansOptions::default();
    for l in [C64::new(0.3, 0.2), C64::new(1.5, -0.4), c(-0.2)] {
        let o = direct_evans_oracle(l, w, 0.0, &opts).unwrap().chart_value(&chart).unwrap();
        let e = riccati_evans(l, w, &chart, 0.0, &opts).unwrap();
        assert!((o - e).norm() < 1e-6 * e.norm(), "{l}: {o} vs {e}");
    }
}

#[test]
fn roots_do_not_depend_on_evaluation_point() {
    let w = wave(0.65);
    let r = unstable_root();
    // at z0 = -2 and 2 a zero of det X sits on the root and E_T stays O(1)
    for z0 in [-2.0, -0.5, 0.5, 1.0, 2.0] {
        let ev = RiccatiEvaluator { z0, ..triangular(w) };
        let (l, _) = newton_polish(&ev, c(r + 4e-3), &RootOptions::default()).unwrap();
        assert!((l - c(r)).norm() < 1e-6, "z0 = {z0}: {l}");
    }
}

#[test]
fn identity_chart_finds_the_same_root() {
    let w = wave(0.65);
    let ev = RiccatiEvaluator::new(w, Chart::identity());
    let (l, _) = newton_polish(&ev, c(unstable_root()), &RootOptions::default()).unwrap();
    assert!((l - c(unstable_root())).norm() < 1e-8, "{l}");
}

#[test]
fn plucker_relation_along_linear_flow() {
    let w = wave(1.0);
    let l = C64::new(0.7, 1.3);
    let f0 = hapto_core::linearization::unstable_frame_minus(l, &w.params).unwrap();
    let mut f = f0;
    let mut z = w.z_min();
    for z1 in [-20.0, -5.0, 0.0, 5.0, 20.0] {
        let (q, _) = integrate_frame(&f, z, z1, l, w, &Default::default()).unwrap();
        let pl = plucker_embed(&q).unwrap();
        assert!(pl.relation_residual() < 1e-8, "z = {z1}: {}", pl.relation_residual());
        f = q;
        z = z1;
    }
}

#[test]
fn locate_roots_finds_the_unstable_eigenvalue() {
    let s = locate_roots(
        &triangular(wave(0.65)),
        C64::new(-0.1, -0.05),
        C64::new(0.3, 0.05),
        0.65,
        &RootOptions::default(),
        Exec::Auto,
    )
    .unwrap();
    assert_eq!(s.roots.len(), 1, "{s:?}");
    let r = s.roots[0].lambda;
    assert!(r.re > 0.0 && r.im.abs() < 1e-8, "{r}");
    assert!((r.re - unstable_root()).abs() < 1e-8);
}

#[test]
fn locate_roots_is_empty_for_type_one() {
    let o = RootOptions::default();
    let ev = triangular(wave(1.0));
    let a = locate_roots(&ev, c(0.0), C64::new(10.0, 10.0), 1.0, &o, Exec::Auto).unwrap();
    let b = locate_roots(&ev, c(0.0), C64::new(10.0, 10.0), 1.0, &o, Exec::Sequential).unwrap();
    assert!(a.roots.is_empty() && a.poles.is_empty());
    assert_eq!(a.cells_examined, b.cells_examined);
}

#[test]
fn winding_is_additive_and_counts_the_root() {
    let ev = triangular(wave(0.65));
    let opts = WindingOptions::default();
    let (lo, hi) = (C64::new(0.01, -0.005), C64::new(0.04, 0.005));
    let total = winding_number(&ev, &Contour::rectangle(lo, hi), &opts, Exec::Auto).unwrap().winding;
    assert_eq!(total, 1);
    let m = C64::new(0.0231, 0.0013);
    let parts = [
        (lo, m),
        (C64::new(m.re, lo.im), C64::new(hi.re, m.im)),
        (C64::new(lo.re, m.im), C64::new(m.re, hi.im)),
        (m, hi),
    ];
    let sum: i64 =
        parts.iter().map(|&(a, b)| winding_number(&ev, &Contour::rectangle(a, b), &opts, Exec::Auto).unwrap().winding).sum();
    assert_eq!(sum, total);
    let s = locate_roots(&ev, lo, hi, 0.65, &RootOptions::default(), Exec::Auto).unwrap();
    assert!(s.poles.is_empty());
    assert_eq!(s.roots.len() as i64, total);
}

#[test]
fn tracked_root_crosses_near_critical_speed() {
    let cfg = TrackConfig::new(default_chart());
    let start = wave(0.70);
    let seed = leading_real_root(start, -0.5, 0.5, 101, &cfg).unwrap();
    let fwd = track_root_in_c(start, 0.65, 10, &seed, &cfg).unwrap();
    assert_eq!(fwd.records.len(), 11);
    let (a, b) = fwd.crossing.unwrap();
    assert!(a >= 0.6701 - 0.02 && b <= 0.6701 + 0.02, "{a} {b}");
    assert!(fwd.records.iter().all(|r| r.lambda.im.abs() < 1e-8));

    // reverse direction from the converged end
    let end = continue_in_c(start, 0.65, 10, &cfg.solver).unwrap().pop().unwrap();
    let last = fwd.records.last().unwrap();
    let back = track_root_in_c(&end, 0.70, 10, last, &cfg).unwrap();
    for (f, b) in fwd.records.iter().zip(back.records.iter().rev()) {
        assert!((f.c - b.c).abs() < 1e-12);
        assert!((f.lambda - b.lambda).norm() < 1e-6, "c = {}: {} vs {}", f.c, f.lambda, b.lambda);
    }
}

#[test]
fn argument_fields_show_no_coalescence() {
    let ev = triangular(wave(1.0));
    let small = argument_field(&ev, c(0.0), C64::new(10.0, 10.0), 21, 21, Exec::Auto).unwrap();
    assert!(small.coalescence_points().is_empty());
    let big = argument_field(&ev, c(0.0), C64::new(1e4, 1e4), 11, 11, Exec::Auto).unwrap();
    assert!(big.coalescence_points().is_empty());
    let one = argument_field(&ev, c(1.0), C64::new(2.0, 2.0), 1, 1, Exec::Auto).unwrap();
    assert_eq!(one.samples.len(), 1);
}
