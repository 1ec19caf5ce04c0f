//! `hapto`: travelling waves and Evans-function stability from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hapto_core::io::{ChartChoice, RunConfig};
use hapto_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hapto", version, about = "Haptotaxis travelling waves and their Evans-function spectrum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the wave at one speed and write its profile.
    ComputeWave {
        #[command(flatten)]
        common: Common,
    },
    /// Continue a wave in `c` and classify each step.
    Continue {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        track: TrackArgs,
    },
    /// Report the type of a wave.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Dispersion curves and the absolute-spectrum edge.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        k_samples: Option<usize>,
    },
    /// Evans function on a real interval.
    EvansSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Use the orthonormal-frame oracle instead of the Riccati flow.
        #[arg(long)]
        oracle: bool,
    },
    /// Winding number on a quarter circle (`--radius`) or a rectangle (`--region`).
    Winding {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Roots and poles of the Evans function in a rectangle.
    LocateRoots {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Follow the leading real root while the wave is continued in `c`.
    TrackRoot {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        track: TrackArgs,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Argument of the Evans function on a grid.
    ArgumentField {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
    },
}

/// Flags shared by every command; they override the config file.
#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    u_inf: Option<f64>,
    /// Wave profile file; computed from the model parameters when absent.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    chart: Option<ChartChoice>,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<f64>,
    #[arg(long)]
    tol_newton: Option<f64>,
    #[arg(long)]
    tol_bc: Option<f64>,
    #[arg(long)]
    tol_mesh: Option<f64>,
    #[arg(long)]
    tol_w: Option<f64>,
    #[arg(long)]
    tol_ode: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct TrackArgs {
    #[arg(long)]
    c_end: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
struct RegionArgs {
    /// Quarter-circle radius.
    #[arg(long, conflicts_with = "region")]
    radius: Option<f64>,
    /// Rectangle `re_lo,im_lo,re_hi,im_hi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    region: Option<Vec<f64>>,
}

impl Common {
    /// File values, then flags.
    fn resolve(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let m = &mut cfg.model;
        set(&mut m.c, self.c);
        set(&mut m.epsilon, self.epsilon);
        set(&mut m.u_inf, self.u_inf);
        let s = &mut cfg.solver;
        set(&mut s.tol_newton, self.tol_newton);
        set(&mut s.tol_bc, self.tol_bc);
        set(&mut s.tol_mesh, self.tol_mesh);
        set(&mut s.tol_w, self.tol_w);
        let e = &mut cfg.evans;
        set(&mut e.chart, self.chart);
        set(&mut e.z0, self.z0);
        set(&mut e.tol_ode, self.tol_ode);
        if let Some(o) = &self.out {
            cfg.output.dir = o.to_string_lossy().into_owned();
        }
        cfg.validate()?;
        let out = PathBuf::from(&cfg.output.dir);
        Ok((cfg, out))
    }
}

impl TrackArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.track.c_end, self.c_end);
        set(&mut cfg.track.steps, self.steps);
    }
}

impl RegionArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        set(&mut cfg.contour.radius, self.radius);
        if let Some(r) = &self.region {
            cfg.contour.region = r.as_slice().try_into().map_err(|_| Error::Config("--region takes four numbers".into()))?;
        }
        cfg.validate()
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    use commands as run;
    match cmd {
        Command::ComputeWave { common } => {
            let (cfg, out) = common.resolve()?;
            run::compute_wave(&cfg, &out)
        }
        Command::Continue { common, track } => {
            let (mut cfg, out) = common.resolve()?;
            track.apply(&mut cfg);
            run::continuation(&cfg, common.profile.as_deref(), &out)
        }
        Command::Classify { common } => {
            let (cfg, _) = common.resolve()?;
            run::classify(&cfg, common.profile.as_deref())
        }
        Command::Spectrum { common, k_min, k_max, k_samples } => {
            let (mut cfg, out) = common.resolve()?;
            let k = &mut cfg.spectrum;
            set(&mut k.k_min, k_min);
            set(&mut k.k_max, k_max);
            set(&mut k.k_samples, k_samples);
            run::spectrum(&cfg, &out)
        }
        Command::EvansSweep { common, lo, hi, n, oracle } => {
            let (mut cfg, out) = common.resolve()?;
            set(&mut cfg.sweep.lo, lo);
            set(&mut cfg.sweep.hi, hi);
            set(&mut cfg.sweep.n, n);
            run::evans_sweep(&cfg, common.profile.as_deref(), oracle, &out)
        }
        Command::Winding { common, region } => {
            let (mut cfg, out) = common.resolve()?;
            region.apply(&mut cfg)?;
            run::winding(&cfg, common.profile.as_deref(), region.region.is_some(), &out)
        }
        Command::LocateRoots { common, region } => {
            let (mut cfg, out) = common.resolve()?;
            region.apply(&mut cfg)?;
            run::locate_roots(&cfg, common.profile.as_deref(), &out)
        }
        Command::TrackRoot { common, track, lo, hi, n } => {
            let (mut cfg, out) = common.resolve()?;
            track.apply(&mut cfg);
            set(&mut cfg.sweep.lo, lo);
            set(&mut cfg.sweep.hi, hi);
            set(&mut cfg.sweep.n, n);
            run::track_root(&cfg, common.profile.as_deref(), &out)
        }
        Command::ArgumentField { common, region, nx, ny } => {
            let (mut cfg, out) = common.resolve()?;
            region.apply(&mut cfg)?;
            set(&mut cfg.contour.nx, nx);
            set(&mut cfg.contour.ny, ny);
            run::argument_field(&cfg, common.profile.as_deref(), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
