use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{slow_rhs_array, ModelParams, SlowState};
use super::bvp::hermite;

pub const PROFILE_VERSION: u32 = 1;
const MAGIC: &str = "# hapto wave profile";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WaveType {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for WaveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WaveType::I => "I",
            WaveType::II => "II",
            WaveType::III => "III",
            WaveType::IV => "IV",
        })
    }
}

impl FromStr for WaveType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(WaveType::I),
            "II" => Ok(WaveType::II),
            "III" => Ok(WaveType::III),
            "IV" => Ok(WaveType::IV),
            other => Err(Error::BadProfileFile(format!("unknown wave type {other:?}"))),
        }
    }
}

/// Discretised heteroclinic orbit in slow coordinates.
#[derive(Clone, Debug)]
pub struct WaveProfile {
    grid: Vec<f64>,
    states: Vec<SlowState>,
    derivs: Vec<[f64; 4]>,
    pub params: ModelParams,
    pub wave_type: WaveType,
    pub bvp_residual: f64,
}

impl WaveProfile {
    pub fn new(
        grid: Vec<f64>,
        states: Vec<SlowState>,
        params: ModelParams,
        wave_type: WaveType,
        bvp_residual: f64,
    ) -> Result<Self> {
        if grid.len() != states.len() || grid.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "profile needs matching grid/state lengths >= 2 (got {} and {})",
                grid.len(),
                states.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("profile grid is not strictly increasing".into()));
        }
        if params.epsilon <= 0.0 {
            return Err(Error::SingularLimit);
        }
        let derivs = states.iter().map(|s| slow_rhs_array(&s.to_array(), params.c, params.epsilon)).collect();
        Ok(Self { grid, states, derivs, params, wave_type, bvp_residual })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn states(&self) -> &[SlowState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn z_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn z_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn u_inf(&self) -> f64 {
        self.params.u_inf
    }

    pub fn min_w(&self) -> f64 {
        self.states.iter().map(|s| s.w).fold(f64::INFINITY, f64::min)
    }

    /// Interval index `i` with `grid[i] <= z <= grid[i + 1]`.
    fn locate(&self, z: f64) -> usize {
        let n = self.grid.len();
        match self.grid.binary_search_by(|g| g.total_cmp(&z)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Cubic Hermite interpolant using the vector field as node slopes.
    pub fn eval(&self, z: f64) -> Result<SlowState> {
        if !(z >= self.z_min() && z <= self.z_max()) {
            return Err(Error::OutOfDomain { z, lo: self.z_min(), hi: self.z_max() });
        }
        Ok(SlowState::from_array(self.eval_array(z)))
    }

    /// Same as [`eval`](Self::eval) without the domain check; callers
    /// guarantee `z` lies in the grid.
    pub fn eval_array(&self, z: f64) -> [f64; 4] {
        self.eval_with_derivative(z).0
    }

    /// Interpolated state and its `z`-derivative.
    pub fn eval_with_derivative(&self, z: f64) -> ([f64; 4], [f64; 4]) {
        let i = self.locate(z);
        let h = self.grid[i + 1] - self.grid[i];
        let t = (z - self.grid[i]) / h;
        let (a, b) = (self.states[i].to_array(), self.states[i + 1].to_array());
        hermite(t, h, &a, &b, &self.derivs[i], &self.derivs[i + 1])
    }

    /// Largest `|w'|` over the nodes, from the vector field.
    pub fn max_abs_dw(&self) -> f64 {
        self.derivs.iter().map(|d| d[3].abs()).fold(0.0, f64::max)
    }

    pub fn node_derivs(&self) -> &[[f64; 4]] {
        &self.derivs
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "version = {PROFILE_VERSION}");
        let _ = writeln!(s, "epsilon = {:.16e}", p.epsilon);
        let _ = writeln!(s, "c = {:.16e}", p.c);
        let _ = writeln!(s, "u_inf = {:.16e}", p.u_inf);
        let _ = writeln!(s, "wave_type = {}", self.wave_type);
        let _ = writeln!(s, "residual = {:.16e}", self.bvp_residual);
        let _ = writeln!(s, "n_nodes = {}", self.grid.len());
        let _ = writeln!(s, "z u y v w");
        for (z, st) in self.grid.iter().zip(&self.states) {
            let _ = writeln!(s, "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}", z, st.u, st.y, st.v, st.w);
        }
        let _ = writeln!(s, "end");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::BadProfileFile(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(bad("missing header line"));
        }
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing field {key}")))?;
            let (k, v) = line.split_once(" = ").ok_or_else(|| bad(&format!("malformed line {line:?}")))?;
            if k != key {
                return Err(bad(&format!("expected {key}, found {k}")));
            }
            Ok(v.to_string())
        };
        let num = |s: String, key: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number for {key}")));
        let version: u32 = field("version")?.parse().map_err(|_| bad("bad version"))?;
        if version != PROFILE_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let epsilon = num(field("epsilon")?, "epsilon")?;
        let c = num(field("c")?, "c")?;
        let u_inf = num(field("u_inf")?, "u_inf")?;
        let wave_type: WaveType = field("wave_type")?.parse()?;
        let residual = num(field("residual")?, "residual")?;
        let n: usize = field("n_nodes")?.parse().map_err(|_| bad("bad n_nodes"))?;
        if lines.next() != Some("z u y v w") {
            return Err(bad("missing column header"));
        }
        let mut grid = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| bad(&format!("truncated after {i} of {n} rows")))?;
            let vals: Vec<f64> = line
                .split_ascii_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(&format!("bad row {i}")))?;
            if vals.len() != 5 {
                return Err(bad(&format!("row {i} has {} columns", vals.len())));
            }
            grid.push(vals[0]);
            states.push(SlowState::new(vals[1], vals[2], vals[3], vals[4]));
        }
        if lines.next() != Some("end") {
            return Err(bad("missing end marker"));
        }
        let params = ModelParams::new(epsilon, c, u_inf).map_err(|e| bad(&e.to_string()))?;
        Self::new(grid, states, params, wave_type, residual).map_err(|e| bad(&e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Rows `z,u,y,v,w` for plotting.
    pub fn to_csv_rows(&self) -> Vec<[f64; 5]> {
        self.grid.iter().zip(&self.states).map(|(z, s)| [*z, s.u, s.y, s.v, s.w]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize) -> WaveProfile {
        let grid: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
        let states = grid
            .iter()
            .map(|&z| {
                let w = 0.5 * (1.0 - (z / 3.0).tanh());
                SlowState::new(1.0 - w + 1e-3 * z.sin(), w * 0.3 + std::f64::consts::PI * 1e-7, -w * (1.0 - w) / 7.0, w)
            })
            .collect();
        WaveProfile::new(grid, states, ModelParams::new(0.01, 1.0, 1.0).unwrap(), WaveType::I, 1.234e-11).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical_and_exact() {
        let p = synthetic(2001);
        let text = p.to_text();
        let q = WaveProfile::from_text(&text).unwrap();
        assert_eq!(q.to_text(), text);
        assert_eq!(q.grid(), p.grid());
        for (a, b) in q.states().iter().zip(p.states()) {
            assert_eq!(a, b);
        }
        assert_eq!(q.params, p.params);
        assert_eq!(q.bvp_residual, p.bvp_residual);
        assert_eq!(q.wave_type, WaveType::I);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = synthetic(50).to_text();
        let cut = &text[..text.len() / 2];
        assert!(matches!(WaveProfile::from_text(cut), Err(Error::BadProfileFile(_))));
        let no_end = text.trim_end().trim_end_matches("end");
        assert!(matches!(WaveProfile::from_text(no_end), Err(Error::BadProfileFile(_))));
        let wrong_version = text.replace("version = 1", "version = 9");
        assert!(matches!(WaveProfile::from_text(&wrong_version), Err(Error::BadProfileFile(_))));
    }

    #[test]
    fn interpolation_hits_nodes_and_stays_in_domain() {
        let p = synthetic(101);
        for (z, s) in p.grid().iter().zip(p.states()) {
            assert_eq!(p.eval(*z).unwrap(), *s);
        }
        assert!(matches!(p.eval(10.5), Err(Error::OutOfDomain { .. })));
        assert!(p.eval(-3.33).is_ok());
    }

    #[test]
    fn rejects_non_monotone_grid() {
        let s = SlowState::default();
        let prm = ModelParams::new(0.01, 1.0, 1.0).unwrap();
        assert!(WaveProfile::new(vec![0.0, 0.0], vec![s, s], prm, WaveType::I, 0.0).is_err());
    }
}
