//! TOML run configuration with a strict schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingSpec, Sigma1Spec, Sigma2Kind, Sigma2Spec, Speed};
use crate::dynamics::{GridSpec, GrowthOptions, HistoryPolicy, MemoryOptions};
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::sw_spec::{Rect, RootTolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sigma1Config {
    /// (1 + cos x)/(2 pi), tensorized in d = 2.
    Cosine,
    /// Explicit (m, sigma_{1,m}) pairs; mirrors are filled in.
    Coefficients { entries: Vec<(Mode, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_n_xi")]
    pub n_xi: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            r_max: default_r_max(),
            n_xi: default_n_xi(),
            tail_tol: default_tail_tol(),
        }
    }
}

fn default_r_max() -> f64 {
    Sigma2Spec::DEFAULT_R_MAX
}
fn default_n_xi() -> usize {
    Sigma2Spec::DEFAULT_N_XI
}
fn default_tail_tol() -> f64 {
    Sigma2Spec::DEFAULT_TAIL_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub d: usize,
    pub n: usize,
    pub gamma: f64,
    pub c: Speed,
    pub sigma1: Sigma1Config,
    pub sigma2: Sigma2Kind,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_x")]
    pub n_x: usize,
    /// Defaults to the sigma_1 band limit.
    #[serde(default)]
    pub m_modes: Option<usize>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_x: default_n_x(),
            m_modes: None,
            dt: default_dt(),
            t_final: default_t_final(),
        }
    }
}

fn default_n_x() -> usize {
    256
}
fn default_dt() -> f64 {
    1e-3
}
fn default_t_final() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Defaults to the sigma_1 band limit + 2.
    #[serde(default)]
    pub m_max: Option<i64>,
    #[serde(default)]
    pub rect: Option<Rect>,
    #[serde(default = "default_residual")]
    pub residual_tol: f64,
    #[serde(default = "default_winding")]
    pub winding_tol: f64,
    #[serde(default = "default_newton")]
    pub newton_max_iter: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            m_max: None,
            rect: None,
            residual_tol: default_residual(),
            winding_tol: default_winding(),
            newton_max_iter: default_newton(),
        }
    }
}

fn default_residual() -> f64 {
    1e-10
}
fn default_winding() -> f64 {
    0.05
}
fn default_newton() -> usize {
    60
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Size of the reference perturbation used by `simulate` and `limit-c`.
    #[serde(default = "default_eps")]
    pub perturbation: f64,
    /// Initial relative size of the eigenvector perturbation used by `growth`.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_c_list")]
    pub c_list: Vec<f64>,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// Solver for `simulate`: "field", "memory" or "hartree".
    #[serde(default = "default_solver")]
    pub solver: String,
    #[serde(default = "default_policy")]
    pub history_policy: HistoryPolicy,
    #[serde(default)]
    pub history_capacity: Option<usize>,
    /// Length of the `growth` run; None sizes it from the predicted rate.
    #[serde(default)]
    pub growth_t_final: Option<f64>,
    /// Growth fit window bounds.
    #[serde(default = "default_lo_factor")]
    pub window_lo_factor: f64,
    #[serde(default = "default_window_hi")]
    pub window_hi: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            perturbation: default_eps(),
            amplitude: default_amplitude(),
            c_list: default_c_list(),
            sample_every: default_sample_every(),
            solver: default_solver(),
            history_policy: default_policy(),
            history_capacity: None,
            growth_t_final: None,
            window_lo_factor: default_lo_factor(),
            window_hi: default_window_hi(),
        }
    }
}

fn default_eps() -> f64 {
    1e-2
}
fn default_amplitude() -> f64 {
    1e-5
}
fn default_c_list() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_sample_every() -> usize {
    10
}
fn default_solver() -> String {
    "field".into()
}
fn default_policy() -> HistoryPolicy {
    HistoryPolicy::Truncate
}
fn default_lo_factor() -> f64 {
    10.0
}
fn default_window_hi() -> f64 {
    1e-2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_dir(),
            formats: default_formats(),
        }
    }
}

fn default_dir() -> String {
    "out".into()
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Plane-wave vector, one entry per torus dimension.
    pub k: Vec<i64>,
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, col)
}

fn bad(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        msg: msg.into(),
    }
}

impl RunConfig {
    /// Parses, validates and fills every defaulted field with its concrete value.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            Error::Parse {
                line,
                column,
                msg: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        let band = cfg.sigma1()?.band_limit();
        cfg.grid.m_modes.get_or_insert(band.max(0) as usize);
        cfg.analysis.m_max.get_or_insert(band + 2);
        cfg.validate_resolved()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Canonical TOML text; parsing it again gives the same config.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    fn validate(&self) -> Result<()> {
        let c = &self.coupling;
        if !(1..=2).contains(&c.d) {
            return Err(bad("coupling.d", format!("must be 1 or 2, got {}", c.d)));
        }
        if c.n < 3 {
            return Err(bad(
                "coupling.n",
                format!("must be >= 3 so that kappa is finite, got {}", c.n),
            ));
        }
        if !(c.gamma >= 0.0 && c.gamma.is_finite()) {
            return Err(bad("coupling.gamma", format!("must be >= 0, got {}", c.gamma)));
        }
        if let Speed::Finite(v) = c.c {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad("coupling.c", format!("must be > 0 or \"infinite\", got {v}")));
            }
        }
        let q = &c.quadrature;
        if !(q.r_max > 0.0 && q.r_max.is_finite()) {
            return Err(bad("coupling.quadrature.r_max", "must be > 0"));
        }
        if q.n_xi == 0 || q.n_xi % 16 != 0 {
            return Err(bad("coupling.quadrature.n_xi", "must be a positive multiple of 16"));
        }
        if !(q.tail_tol > 0.0) {
            return Err(bad("coupling.quadrature.tail_tol", "must be > 0"));
        }
        if self.k.len() != c.d {
            return Err(bad("k", format!("needs {} components, got {}", c.d, self.k.len())));
        }
        let g = &self.grid;
        if !g.n_x.is_power_of_two() || g.n_x < 4 {
            return Err(bad("grid.n_x", format!("must be a power of two >= 4, got {}", g.n_x)));
        }
        if !(g.dt > 0.0 && g.dt.is_finite()) {
            return Err(bad("grid.dt", format!("must be > 0, got {}", g.dt)));
        }
        if !(g.t_final >= 0.0 && g.t_final.is_finite()) {
            return Err(bad("grid.t_final", format!("must be >= 0, got {}", g.t_final)));
        }
        let a = &self.analysis;
        if !(a.residual_tol > 0.0) {
            return Err(bad("analysis.residual_tol", "must be > 0"));
        }
        if !(a.winding_tol > 0.0 && a.winding_tol < 0.5) {
            return Err(bad("analysis.winding_tol", "must lie in (0, 0.5)"));
        }
        if a.newton_max_iter == 0 {
            return Err(bad("analysis.newton_max_iter", "must be >= 1"));
        }
        if let Some(r) = &a.rect {
            if !(r.re_min > 0.0 && r.re_max > r.re_min && r.im_max > r.im_min) {
                return Err(bad(
                    "analysis.rect",
                    "needs 0 < re_min < re_max and im_min < im_max",
                ));
            }
        }
        let d = &self.dynamics;
        if !(d.perturbation >= 0.0 && d.perturbation < 1.0) {
            return Err(bad("dynamics.perturbation", "must lie in [0, 1)"));
        }
        if !(d.amplitude > 0.0 && d.amplitude < d.window_hi) {
            return Err(bad("dynamics.amplitude", "must lie in (0, window_hi)"));
        }
        if d.c_list.is_empty() || d.c_list.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(bad("dynamics.c_list", "must be a nonempty list of positive speeds"));
        }
        if !["field", "memory", "hartree"].contains(&d.solver.as_str()) {
            return Err(bad(
                "dynamics.solver",
                format!("must be \"field\", \"memory\" or \"hartree\", got \"{}\"", d.solver),
            ));
        }
        if let Some(t) = d.growth_t_final {
            if !(t > 0.0 && t.is_finite()) {
                return Err(bad("dynamics.growth_t_final", "must be > 0"));
            }
        }
        if d.sample_every == 0 {
            return Err(bad("dynamics.sample_every", "must be >= 1"));
        }
        if !(d.window_lo_factor > 1.0) {
            return Err(bad("dynamics.window_lo_factor", "must be > 1"));
        }
        if !(d.window_hi > 0.0 && d.window_hi < 1.0) {
            return Err(bad("dynamics.window_hi", "must lie in (0, 1)"));
        }
        if self.output.formats.is_empty() {
            return Err(bad("output.formats", "must name at least one format"));
        }
        Ok(())
    }

    fn validate_resolved(&self) -> Result<()> {
        let band = self.sigma1()?.band_limit();
        let m_modes = self.grid.m_modes.unwrap();
        if (m_modes as i64) < band {
            return Err(bad(
                "grid.m_modes",
                format!("must cover the sigma1 band limit {band}, got {m_modes}"),
            ));
        }
        if self.grid.n_x < 2 * m_modes + 2 {
            return Err(bad(
                "grid.n_x",
                format!("must be >= 2 m_modes + 2 = {}", 2 * m_modes + 2),
            ));
        }
        if self.analysis.m_max.unwrap() < 0 {
            return Err(bad("analysis.m_max", "must be >= 0"));
        }
        Ok(())
    }

    pub fn sigma1(&self) -> Result<Sigma1Spec> {
        let d = self.coupling.d;
        match &self.coupling.sigma1 {
            Sigma1Config::Cosine => Sigma1Spec::cosine(d),
            Sigma1Config::Coefficients { entries } => Sigma1Spec::new(d, entries),
        }
        .map_err(|e| bad("coupling.sigma1", e.to_string()))
    }

    pub fn coupling_spec(&self) -> Result<CouplingSpec> {
        let c = &self.coupling;
        let q = &c.quadrature;
        let s2 = Sigma2Spec::new(c.sigma2.clone(), q.r_max, q.n_xi, q.tail_tol)
            .map_err(|e| bad("coupling.sigma2", e.to_string()))?;
        CouplingSpec::new(c.d, c.n, c.gamma, c.c, self.sigma1()?, s2)
    }

    pub fn k_mode(&self) -> Mode {
        Mode::new(&self.k)
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(
            self.grid.n_x,
            self.grid.m_modes.unwrap_or(1),
            self.grid.dt,
            self.grid.t_final,
        )
    }

    pub fn m_max(&self) -> i64 {
        self.analysis.m_max.unwrap_or(3)
    }

    pub fn root_tolerances(&self) -> RootTolerances {
        RootTolerances {
            residual: self.analysis.residual_tol,
            winding: self.analysis.winding_tol,
            newton_max_iter: self.analysis.newton_max_iter,
            ..RootTolerances::default()
        }
    }

    pub fn growth_options(&self) -> GrowthOptions {
        GrowthOptions {
            lo_factor: self.dynamics.window_lo_factor,
            hi: self.dynamics.window_hi,
            exit_threshold: self.dynamics.window_hi,
            sample_every: self.dynamics.sample_every,
            ..GrowthOptions::default()
        }
    }

    pub fn memory_options(&self) -> MemoryOptions {
        MemoryOptions {
            capacity: self.dynamics.history_capacity,
            policy: self.dynamics.history_policy,
            ..MemoryOptions::default()
        }
    }
}
