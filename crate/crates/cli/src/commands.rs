use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hapto_core::analysis::{
    self, winding_number, ContourKind, Evaluator, OracleEvaluator, RiccatiEvaluator, WindingReport,
};
use hapto_core::io::svg::{phase_portrait, Plot, Series};
use hapto_core::io::{Cell, RunConfig, Table};
use hapto_core::linalg::C64;
use hapto_core::linearization::{absolute_spectrum_edge, dispersion_curves, weight_interval, DispersionFamily};
use hapto_core::wave::{classify_wave, compute_wave as solve_wave, continue_with, type_iii_bracket};
use hapto_core::{Error, Exec, Result, WaveProfile};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory plus the provenance stamped on every CSV.
struct Sink {
    dir: PathBuf,
    hash: String,
}

impl Sink {
    fn open(cfg: &RunConfig, dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("run.toml"), cfg.to_toml_string())?;
        Ok(Self { dir: dir.to_path_buf(), hash: cfg.hash() })
    }

    fn table(&self, name: &str, t: &Table) -> Result<()> {
        t.write(&self.dir.join(name), VERSION, &self.hash)
    }

    fn text(&self, name: &str, body: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), body)?;
        Ok(())
    }

    /// Writes a report whose last lines carry the outcome, then passes the
    /// result through.
    fn report<T>(&self, name: &str, head: &str, r: Result<T>) -> Result<T> {
        let mut s = head.to_string();
        match &r {
            Ok(_) => s.push_str("status = ok\n"),
            Err(e) => {
                let _ = writeln!(s, "status = error");
                let _ = writeln!(s, "error = {e}");
            }
        }
        self.text(name, &s)?;
        r
    }
}

fn load_wave(cfg: &RunConfig, profile: Option<&Path>) -> Result<WaveProfile> {
    match profile {
        Some(p) => WaveProfile::load(p),
        None => solve_wave(&cfg.params()?, &cfg.solver_config()),
    }
}

fn wave_summary(w: &WaveProfile) -> String {
    let p = &w.params;
    format!(
        "epsilon = {}\nc = {}\nu_inf = {}\nwave_type = {}\nresidual = {:e}\nn_nodes = {}\nmin_w = {}\n",
        p.epsilon,
        p.c,
        w.u_inf(),
        w.wave_type,
        w.bvp_residual,
        w.len(),
        w.min_w()
    )
}

fn profile_outputs(sink: &Sink, w: &WaveProfile) -> Result<()> {
    w.save(&sink.dir.join("wave.txt"))?;
    let mut t = Table::new(&["z", "u", "y", "v", "w"]);
    let rows = w.to_csv_rows();
    for r in &rows {
        t.push(r.iter().map(|&x| Cell::from(x)).collect());
    }
    sink.table("wave.csv", &t)?;
    let series = |k: usize, name: &str| Series::line(name, rows.iter().map(|r| (r[0], r[k])).collect());
    let plot = Plot {
        title: format!("wave profile, c = {}, type {}", w.params.c, w.wave_type),
        x_label: "z".into(),
        y_label: "state".into(),
        series: vec![series(1, "u"), series(3, "v"), series(4, "w")],
        vlines: vec![],
        zero_line: true,
    };
    sink.text("wave.svg", &plot.render())
}

pub fn compute_wave(cfg: &RunConfig, out: &Path) -> Result<()> {
    let w = solve_wave(&cfg.params()?, &cfg.solver_config())?;
    let sink = Sink::open(cfg, out)?;
    profile_outputs(&sink, &w)?;
    let summary = wave_summary(&w);
    sink.text("summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn continuation(cfg: &RunConfig, profile: Option<&Path>, out: &Path) -> Result<()> {
    let start = load_wave(cfg, profile)?;
    let path = continue_with(&start, cfg.track.c_end, cfg.track.steps.max(1), &cfg.solver_config(), |w| {
        eprintln!("c = {} type {}", w.params.c, w.wave_type)
    })?;
    let sink = Sink::open(cfg, out)?;
    let mut t = Table::new(&["c", "wave_type", "u_inf", "residual", "min_w", "max_abs_dw"]);
    for w in &path {
        t.push(vec![
            w.params.c.into(),
            w.wave_type.to_string().into(),
            w.u_inf().into(),
            w.bvp_residual.into(),
            w.min_w().into(),
            w.max_abs_dw().into(),
        ]);
    }
    sink.table("continuation.csv", &t)?;
    let last = path.last().expect("continuation returns the start");
    profile_outputs(&sink, last)?;
    let mut s = format!("steps = {}\nc_start = {}\nc_end = {}\n", path.len() - 1, start.params.c, last.params.c);
    match type_iii_bracket(&path) {
        Some((a, b)) => {
            let _ = writeln!(s, "type_iii_bracket = {a} {b}");
        }
        None => s.push_str("type_iii_bracket = none\n"),
    }
    sink.text("continuation.txt", &s)?;
    print!("{s}");
    Ok(())
}

pub fn classify(cfg: &RunConfig, profile: Option<&Path>) -> Result<()> {
    let w = load_wave(cfg, profile)?;
    let t = classify_wave(&w, &cfg.solver_config());
    println!("{}classified = {t}", wave_summary(&w));
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, out: &Path) -> Result<()> {
    let k = &cfg.spectrum;
    if k.k_samples < 2 || !(k.k_max > k.k_min) {
        return Err(Error::Config(format!(
            "empty k-range: need k_min < k_max and at least 2 samples (got [{}, {}], {})",
            k.k_min, k.k_max, k.k_samples
        )));
    }
    let p = cfg.params()?;
    let ks: Vec<f64> = (0..k.k_samples).map(|i| k.k_min + (k.k_max - k.k_min) * i as f64 / (k.k_samples - 1) as f64).collect();
    let sink = Sink::open(cfg, out)?;
    let edge = absolute_spectrum_edge(&p);
    let mut s = format!("epsilon = {}\nc = {}\nabsolute_spectrum_edge = {edge}\n", p.epsilon, p.c);
    match weight_interval(&p) {
        Ok((a, b)) => {
            let _ = writeln!(s, "weight_interval = {a} {b}");
        }
        Err(e) => {
            let _ = writeln!(s, "weight_interval = none ({e})");
        }
    }
    let mut series = Vec::new();
    for (family, file) in [(DispersionFamily::Standard, "dispersion.csv"), (DispersionFamily::TypeIII, "dispersion_type3.csv")] {
        let curves = dispersion_curves(&p, &ks, family);
        let mut t = Table::new(&["k", "re_lambda", "im_lambda", "curve_label"]);
        for cv in &curves {
            for &(kk, l) in &cv.points {
                t.push(vec![kk.into(), l.re.into(), l.im.into(), cv.label.into()]);
            }
            let at0 = cv.points.iter().min_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).map(|q| q.1);
            let tag = if family == DispersionFamily::Standard { "standard" } else { "type_iii" };
            let _ = writeln!(
                s,
                "curve {tag} {} intercept = {} max_residual = {:e}",
                cv.label,
                at0.map_or(f64::NAN, |l| l.re + 0.0),
                cv.max_residual
            );
            if family == DispersionFamily::Standard {
                series.push(Series::line(cv.label, cv.points.iter().map(|q| (q.1.re, q.1.im)).collect()));
            }
        }
        sink.table(file, &t)?;
    }
    let plot = Plot {
        title: format!("dispersion curves, c = {}, epsilon = {}", p.c, p.epsilon),
        x_label: "Re lambda".into(),
        y_label: "Im lambda".into(),
        series,
        vlines: vec![(edge, format!("edge {edge}"))],
        zero_line: true,
    };
    sink.text("spectrum.svg", &plot.render())?;
    sink.text("spectrum.txt", &s)?;
    print!("{s}");
    Ok(())
}

fn evaluator<'a>(cfg: &RunConfig, w: &'a WaveProfile) -> RiccatiEvaluator<'a> {
    RiccatiEvaluator { wave: w, chart: cfg.chart(), z0: cfg.evans.z0, opts: cfg.evans_options() }
}

pub fn evans_sweep(cfg: &RunConfig, profile: Option<&Path>, oracle: bool, out: &Path) -> Result<()> {
    let w = load_wave(cfg, profile)?;
    let ric = evaluator(cfg, &w);
    let ora = OracleEvaluator { wave: &w, chart: None, z0: cfg.evans.z0, opts: cfg.evans_options() };
    let ev: &dyn Evaluator = if oracle { &ora } else { &ric };
    let sw = &cfg.sweep;
    let sweep = analysis::sweep_real(ev, sw.lo, sw.hi, sw.n, Exec::Auto)?;
    let sink = Sink::open(cfg, out)?;
    let label = ev.label();
    let mut t = Table::new(&["re_lambda", "im_lambda", "re_e", "im_e", "chart_label", "status"]);
    for s in &sweep.samples {
        let v = s.value.unwrap_or(C64::new(f64::NAN, f64::NAN));
        t.push(vec![s.lambda.re.into(), s.lambda.im.into(), v.re.into(), v.im.into(), label.as_str().into(), s.status.as_str().into()]);
    }
    sink.table("evans_sweep.csv", &t)?;
    let mut b = Table::new(&["lo", "hi", "kind", "root"]);
    for r in &sweep.brackets {
        b.push(vec![r.lo.into(), r.hi.into(), format!("{:?}", r.kind).into(), r.root.into()]);
    }
    sink.table("brackets.csv", &b)?;
    let pts = |f: fn(C64) -> f64| -> Vec<(f64, f64)> {
        sweep.samples.iter().map(|s| (s.lambda.re, s.value.map_or(f64::NAN, f))).collect()
    };
    let plot = Plot {
        title: format!("Evans function ({label}), c = {}", w.params.c),
        x_label: "lambda".into(),
        y_label: "E".into(),
        series: vec![Series::line("Re E", pts(|v| v.re)), Series::line("Im E", pts(|v| v.im))],
        vlines: sweep.brackets.iter().map(|r| (r.root, format!("root {:.6}", r.root))).collect(),
        zero_line: true,
    };
    sink.text("evans_sweep.svg", &plot.render())?;
    let mut s = format!(
        "function = {label}\ninterval = {} {}\nsamples = {}\nfailed = {}\nmin_modulus = {:e}\nmedian_modulus = {:e}\nroots = {}\n",
        sw.lo,
        sw.hi,
        sw.n,
        sweep.samples.iter().filter(|x| x.value.is_none()).count(),
        sweep.min_modulus(),
        sweep.median_modulus(),
        sweep.brackets.len()
    );
    if let Some(l) = sweep.leading() {
        let _ = writeln!(s, "leading_root = {}", l.root);
    }
    sink.text("evans_sweep.txt", &s)?;
    print!("{s}");
    Ok(())
}

fn winding_outputs(sink: &Sink, rep: &WindingReport) -> Result<()> {
    let mut t = Table::new(&["piece", "t", "re_lambda", "im_lambda", "re_e", "im_e"]);
    let mut acc = 0.0;
    let mut curve = Vec::with_capacity(rep.samples.len());
    let mut prev: Option<C64> = None;
    for (i, &(piece, tt, l, e)) in rep.samples.iter().enumerate() {
        t.push(vec![(piece as i64).into(), tt.into(), l.re.into(), l.im.into(), e.re.into(), e.im.into()]);
        if let Some(p) = prev {
            acc += (e / p).arg();
        }
        prev = Some(e);
        curve.push((i as f64, acc / std::f64::consts::TAU));
    }
    sink.table("winding_samples.csv", &t)?;
    let plot = Plot {
        title: format!("{} on {}", rep.label, rep.contour),
        x_label: "sample".into(),
        y_label: "accumulated arg E / 2 pi".into(),
        series: vec![Series::line("arg E / 2 pi", curve)],
        vlines: vec![],
        zero_line: true,
    };
    sink.text("winding.svg", &plot.render())
}

pub fn winding(cfg: &RunConfig, profile: Option<&Path>, rectangle: bool, out: &Path) -> Result<()> {
    let w = load_wave(cfg, profile)?;
    let ev = evaluator(cfg, &w);
    let kind = if rectangle {
        let (lo, hi) = cfg.region();
        ContourKind::Rectangle { lo, hi }
    } else {
        ContourKind::QuarterCircle(cfg.contour.radius)
    };
    let contour = cfg.contour(kind);
    let sink = Sink::open(cfg, out)?;
    match winding_number(&ev, &contour, &cfg.winding_options(), Exec::Auto) {
        Ok(rep) => {
            winding_outputs(&sink, &rep)?;
            let s = rep.to_text();
            sink.report("winding.txt", &s, Ok(()))?;
            print!("{s}");
            Ok(())
        }
        Err(e) => {
            let head = format!("contour = {contour}\nfunction = {}\n", ev.label());
            sink.report("winding.txt", &head, Err(e))
        }
    }
}

pub fn locate_roots(cfg: &RunConfig, profile: Option<&Path>, out: &Path) -> Result<()> {
    let w = load_wave(cfg, profile)?;
    let ev = evaluator(cfg, &w);
    let (lo, hi) = cfg.region();
    let sink = Sink::open(cfg, out)?;
    let head = format!("function = {}\nregion = {} {} {} {}\n", ev.label(), lo.re, lo.im, hi.re, hi.im);
    let r = analysis::locate_roots(&ev, lo, hi, w.params.c, &cfg.root_options(), Exec::Auto);
    let found = match r {
        Ok(f) => f,
        Err(e) => return sink.report("locate_roots.txt", &head, Err(e)),
    };
    let mut t = Table::new(&["re_lambda", "im_lambda", "residual", "multiplicity"]);
    for r in &found.roots {
        t.push(vec![r.lambda.re.into(), r.lambda.im.into(), r.residual.into(), r.multiplicity.into()]);
    }
    sink.table("roots.csv", &t)?;
    let mut p = Table::new(&["re_lambda", "im_lambda"]);
    for z in &found.poles {
        p.push(vec![z.re.into(), z.im.into()]);
    }
    sink.table("poles.csv", &p)?;
    let mut s = head;
    let _ = writeln!(s, "roots = {}\npoles = {}\ncells_examined = {}", found.roots.len(), found.poles.len(), found.cells_examined);
    for r in &found.roots {
        let _ = writeln!(s, "root = {} {}", r.lambda.re, r.lambda.im);
    }
    sink.report("locate_roots.txt", &s, Ok(()))?;
    print!("{s}");
    Ok(())
}

pub fn track_root(cfg: &RunConfig, profile: Option<&Path>, out: &Path) -> Result<()> {
    let start = load_wave(cfg, profile)?;
    let tc = cfg.track_config();
    let sink = Sink::open(cfg, out)?;
    let head = format!("c_start = {}\nc_end = {}\nsteps = {}\n", start.params.c, cfg.track.c_end, cfg.track.steps);
    let r = analysis::leading_real_root(&start, cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.n, &tc)
        .and_then(|seed| analysis::track_root_in_c(&start, cfg.track.c_end, cfg.track.steps, &seed, &tc));
    let res = match r {
        Ok(r) => r,
        Err(e) => return sink.report("crossing.txt", &head, Err(e)),
    };
    let mut t = Table::new(&["c", "re_lambda", "im_lambda", "residual"]);
    for r in &res.records {
        t.push(vec![r.c.into(), r.lambda.re.into(), r.lambda.im.into(), r.residual.into()]);
    }
    sink.table("root_path.csv", &t)?;
    let mut s = head;
    match res.crossing {
        Some((a, b)) => {
            let _ = writeln!(s, "crossing = {a} {b}");
        }
        None => s.push_str("crossing = none\n"),
    }
    let plot = Plot {
        title: "leading real eigenvalue".into(),
        x_label: "c".into(),
        y_label: "Re lambda*".into(),
        series: vec![Series::line("Re lambda*", res.records.iter().map(|r| (r.c, r.lambda.re)).collect())],
        vlines: res.crossing.map(|(a, b)| (0.5 * (a + b), format!("crossing in ({a}, {b})"))).into_iter().collect(),
        zero_line: true,
    };
    sink.text("root_path.svg", &plot.render())?;
    sink.report("crossing.txt", &s, Ok(()))?;
    print!("{s}");
    Ok(())
}

pub fn argument_field(cfg: &RunConfig, profile: Option<&Path>, out: &Path) -> Result<()> {
    let w = load_wave(cfg, profile)?;
    let ev = evaluator(cfg, &w);
    let (lo, hi) = cfg.region();
    let f = analysis::argument_field(&ev, lo, hi, cfg.contour.nx, cfg.contour.ny, Exec::Auto)?;
    let sink = Sink::open(cfg, out)?;
    let mut t = Table::new(&["re_lambda", "im_lambda", "re_e", "im_e", "arg", "status"]);
    for s in &f.samples {
        let v = s.value.unwrap_or(C64::new(f64::NAN, f64::NAN));
        let arg = s.value.map_or(f64::NAN, |v| v.arg());
        t.push(vec![s.lambda.re.into(), s.lambda.im.into(), v.re.into(), v.im.into(), arg.into(), s.status.as_str().into()]);
    }
    sink.table("argument_field.csv", &t)?;
    let points = f.coalescence_points();
    let mut c = Table::new(&["re_lambda", "im_lambda", "winding"]);
    for (z, k) in &points {
        c.push(vec![z.re.into(), z.im.into(), (*k).into()]);
    }
    sink.table("coalescence.csv", &c)?;
    let marks: Vec<(f64, f64)> = points.iter().map(|(z, _)| (z.re, z.im)).collect();
    let title = format!("arg E ({}), c = {}", ev.label(), w.params.c);
    sink.text("argument_field.svg", &phase_portrait(&title, &f.xs, &f.ys, |i, j| f.arg(i, j), &marks))?;
    let s = format!(
        "grid = {} x {}\nfailed = {}\ncoalescence_points = {}\n",
        f.nx(),
        f.ny(),
        f.samples.iter().filter(|x| x.value.is_none()).count(),
        points.len()
    );
    sink.text("argument_field.txt", &s)?;
    print!("{s}");
    Ok(())
}
