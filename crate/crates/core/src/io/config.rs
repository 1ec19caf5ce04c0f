use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{Contour, ContourKind, RootOptions, TrackConfig, WindingOptions};
use crate::error::{Error, Result};
use crate::grassmann::{default_chart, Chart, EvansOptions};
use crate::linalg::C64;
use crate::model::ModelParams;
use crate::wave::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartChoice {
    Triangular,
    Identity,
}

impl ChartChoice {
    pub fn chart(self) -> Chart {
        match self {
            ChartChoice::Triangular => default_chart(),
            ChartChoice::Identity => Chart::identity(),
        }
    }
}

impl std::str::FromStr for ChartChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(ChartChoice::Triangular),
            "identity" => Ok(ChartChoice::Identity),
            other => Err(Error::Config(format!("unknown chart {other:?} (expected triangular or identity)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub epsilon: f64,
    pub c: f64,
    pub u_inf: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { epsilon: 0.01, c: 1.0, u_inf: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol_newton: f64,
    pub tol_bc: f64,
    pub tol_w: f64,
    pub tol_mesh: f64,
    pub max_iter: usize,
    pub max_nodes: usize,
    pub l_minus: f64,
    pub l_plus: f64,
    pub kappa: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            tol_newton: s.tol_newton,
            tol_bc: s.tol_bc,
            tol_w: s.tol_w,
            tol_mesh: s.tol_mesh,
            max_iter: s.max_iter,
            max_nodes: s.max_nodes,
            l_minus: s.l_minus,
            l_plus: s.l_plus,
            kappa: s.kappa,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvansSection {
    pub chart: ChartChoice,
    pub z0: f64,
    pub tol_ode: f64,
    pub atol_ode: f64,
    pub blowup: f64,
    pub relaxation: f64,
}

impl Default for EvansSection {
    fn default() -> Self {
        let e = EvansOptions::default();
        Self {
            chart: ChartChoice::Triangular,
            z0: 0.0,
            tol_ode: e.ode.rtol,
            atol_ode: e.ode.atol,
            blowup: e.blowup,
            relaxation: e.relaxation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { lo: -0.5, hi: 0.5, n: 101 }
    }
}

/// Contours, regions and root search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourSection {
    pub radius: f64,
    /// `[re_lo, im_lo, re_hi, im_hi]`
    pub region: [f64; 4],
    pub n_min: usize,
    pub max_samples: usize,
    pub tol_root: f64,
    pub coarse_tol: f64,
    pub min_cell: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for ContourSection {
    fn default() -> Self {
        let r = RootOptions::default();
        Self {
            radius: 10.0,
            region: [0.0, 0.0, 10.0, 10.0],
            n_min: 32,
            max_samples: r.winding.max_samples,
            tol_root: r.tol,
            coarse_tol: r.coarse_tol,
            min_cell: r.min_cell,
            nx: 41,
            ny: 41,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackSection {
    pub c_end: f64,
    pub steps: usize,
}

impl Default for TrackSection {
    fn default() -> Self {
        Self { c_end: 0.65, steps: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub k_min: f64,
    pub k_max: f64,
    pub k_samples: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { k_min: -20.0, k_max: 20.0, k_samples: 1001 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Seed for randomised checks; the pipeline itself draws no random numbers.
    pub seed: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), seed: 0 }
    }
}

/// Everything a run depends on. Stored as TOML with one table per section.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub solver: SolverSection,
    pub evans: EvansSection,
    pub sweep: SweepSection,
    pub contour: ContourSection,
    pub track: TrackSection,
    pub spectrum: SpectrumSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form. The
    /// output directory does not enter.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir.clear();
        let digest = Sha256::digest(c.to_toml_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Positivity and ordering checks; does not touch the model parameters,
    /// which are validated where they are used.
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        let e = &self.evans;
        let k = &self.contour;
        let positive = [
            ("solver.tol_newton", s.tol_newton),
            ("solver.tol_bc", s.tol_bc),
            ("solver.tol_w", s.tol_w),
            ("solver.tol_mesh", s.tol_mesh),
            ("solver.l_minus", s.l_minus),
            ("solver.l_plus", s.l_plus),
            ("solver.kappa", s.kappa),
            ("evans.tol_ode", e.tol_ode),
            ("evans.atol_ode", e.atol_ode),
            ("evans.blowup", e.blowup),
            ("contour.radius", k.radius),
            ("contour.tol_root", k.tol_root),
            ("contour.coarse_tol", k.coarse_tol),
            ("contour.min_cell", k.min_cell),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite (got {v})")));
            }
        }
        if e.relaxation < 0.0 {
            return Err(Error::Config(format!("evans.relaxation must be non-negative (got {})", e.relaxation)));
        }
        let [a, b, c, d] = k.region;
        if !(c > a && d > b) {
            return Err(Error::Config(format!("contour.region needs re_lo < re_hi and im_lo < im_hi (got {:?})", k.region)));
        }
        if k.n_min < 2 || s.max_iter == 0 {
            return Err(Error::Config("contour.n_min must be >= 2 and solver.max_iter >= 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model.epsilon, self.model.c, self.model.u_inf)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            tol_newton: s.tol_newton,
            tol_bc: s.tol_bc,
            tol_w: s.tol_w,
            tol_mesh: s.tol_mesh,
            max_iter: s.max_iter,
            max_nodes: s.max_nodes,
            l_minus: s.l_minus,
            l_plus: s.l_plus,
            kappa: s.kappa,
            ..SolverConfig::default()
        }
    }

    pub fn evans_options(&self) -> EvansOptions {
        let d = EvansOptions::default();
        let e = &self.evans;
        EvansOptions {
            ode: crate::ode::OdeOptions { rtol: e.tol_ode, atol: e.atol_ode, ..d.ode },
            blowup: e.blowup,
            relaxation: e.relaxation,
        }
    }

    pub fn chart(&self) -> Chart {
        self.evans.chart.chart()
    }

    pub fn winding_options(&self) -> WindingOptions {
        WindingOptions { max_samples: self.contour.max_samples, ..WindingOptions::default() }
    }

    pub fn root_options(&self) -> RootOptions {
        let k = &self.contour;
        RootOptions {
            tol: k.tol_root,
            coarse_tol: k.coarse_tol,
            min_cell: k.min_cell,
            winding: self.winding_options(),
            ..RootOptions::default()
        }
    }

    pub fn track_config(&self) -> TrackConfig {
        TrackConfig {
            solver: self.solver_config(),
            evans: self.evans_options(),
            roots: self.root_options(),
            z0: self.evans.z0,
            ..TrackConfig::new(self.chart())
        }
    }

    pub fn contour(&self, kind: ContourKind) -> Contour {
        Contour { n_min: self.contour.n_min, ..Contour::new(kind) }
    }

    pub fn region(&self) -> (C64, C64) {
        let [a, b, c, d] = self.contour.region;
        (C64::new(a, b), C64::new(c, d))
    }
}
