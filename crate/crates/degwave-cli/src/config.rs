//! Run-configuration file (TOML, dotted sections, unknown keys rejected).

use std::path::{Path, PathBuf};

use degwave::{CoefficientProfile, CoefficientSet};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub coefficients: Coefficients,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub time: TimeBlock,
    #[serde(default)]
    pub data: DataBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub observe: ObserveBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub a: ProfileSpec,
    #[serde(default)]
    pub b: Option<ProfileSpec>,
    pub d: ProfileSpec,
    #[serde(default)]
    pub lambda: f64,
    /// interpret `lambda` as a fraction of 1/C_HP instead of an absolute value
    #[serde(default)]
    pub lambda_is_fraction: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Power {
        #[serde(rename = "K")]
        k: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Constant { value: f64 },
    Tabulated { path: PathBuf },
    Zero {},
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default = "default_n")]
    pub n: usize,
    /// dt = dt_factor * h
    #[serde(default = "one")]
    pub dt_factor: f64,
}

fn default_n() -> usize {
    200
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { n: default_n(), dt_factor: 1.0 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBlock {
    /// absolute horizon; mutually exclusive with t_factor
    #[serde(default)]
    pub t: Option<f64>,
    /// horizon as a multiple of the critical time T0
    #[serde(default)]
    pub t_factor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataBlock {
    /// "modes" | "sine" | "packet" | "zero"
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// mode index for kind = "sine"
    #[serde(default = "one_usize")]
    pub mode: usize,
    #[serde(default = "default_center")]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_kind() -> String {
    "sine".into()
}
fn default_modes() -> usize {
    8
}
fn one_usize() -> usize {
    1
}
fn default_center() -> f64 {
    0.15
}
fn default_width() -> f64 {
    0.05
}

impl Default for DataBlock {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            modes: default_modes(),
            mode: 1,
            center: default_center(),
            width: default_width(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub conservative: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// relative energy-drift bound for homogeneous runs
    #[serde(default = "default_drift")]
    pub drift: f64,
    /// relative inequality-margin tolerance
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// relative final-norm bound for null-control verification
    #[serde(default = "default_control")]
    pub control: f64,
    /// CG residual tolerance
    #[serde(default = "default_cg")]
    pub cg: f64,
    #[serde(default = "default_cg_iters")]
    pub cg_max_iters: usize,
}

fn default_drift() -> f64 {
    1e-8
}
fn default_margin() -> f64 {
    0.02
}
fn default_control() -> f64 {
    1e-2
}
fn default_cg() -> f64 {
    1e-7
}
fn default_cg_iters() -> usize {
    200
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            drift: default_drift(),
            margin: default_margin(),
            control: default_control(),
            cg: default_cg(),
            cg_max_iters: default_cg_iters(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserveBlock {
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
    /// independent random data sets for the inequality suite
    #[serde(default = "default_suite")]
    pub suite: usize,
}

fn default_budget() -> usize {
    256
}
fn default_refine() -> usize {
    64
}
fn default_suite() -> usize {
    100
}

impl Default for ObserveBlock {
    fn default() -> Self {
        Self {
            budget: default_budget(),
            refine: default_refine(),
            suite: default_suite(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default)]
    pub k_a: Option<Vec<f64>>,
    #[serde(default)]
    pub k_d: Option<Vec<f64>>,
    /// lambda values as fractions of 1/C_HP
    #[serde(default)]
    pub lambda_frac: Option<Vec<f64>>,
    #[serde(default)]
    pub t_factor: Option<Vec<f64>>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&body).map_err(|e| ConfigError(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.n < 4 || self.grid.n > 1 << 20 {
            return Err(ConfigError(format!(
                "grid.n = {} outside [4, 2^20]",
                self.grid.n
            )));
        }
        if !(self.grid.dt_factor > 0.0 && self.grid.dt_factor <= 10.0) {
            return Err(ConfigError("grid.dt_factor must be in (0, 10]".into()));
        }
        if self.time.t.is_some() && self.time.t_factor.is_some() {
            return Err(ConfigError("time.t and time.t_factor are mutually exclusive".into()));
        }
        if let Some(t) = self.time.t {
            if t <= 0.0 {
                return Err(ConfigError("time.t must be positive".into()));
            }
        }
        if let Some(f) = self.time.t_factor {
            if f <= 0.0 {
                return Err(ConfigError("time.t_factor must be positive".into()));
            }
        }
        match self.data.kind.as_str() {
            "modes" | "sine" | "packet" | "zero" => {}
            other => {
                return Err(ConfigError(format!(
                    "data.kind must be one of modes|sine|packet|zero, got {other:?}"
                )))
            }
        }
        for (name, v) in [
            ("tolerances.drift", self.tolerances.drift),
            ("tolerances.margin", self.tolerances.margin),
            ("tolerances.control", self.tolerances.control),
            ("tolerances.cg", self.tolerances.cg),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }

    /// Resolve the coefficient triple; `base_dir` anchors tabulated CSV paths.
    pub fn coefficient_set(&self, base_dir: &Path) -> Result<CoefficientSet, ConfigError> {
        let resolve = |spec: &ProfileSpec| -> Result<CoefficientProfile, ConfigError> {
            Ok(match spec {
                ProfileSpec::Power { k, scale } => CoefficientProfile::power(*k, *scale),
                ProfileSpec::Constant { value } => CoefficientProfile::constant(*value),
                ProfileSpec::Zero {} => CoefficientProfile::zero(),
                ProfileSpec::Tabulated { path } => {
                    let full = if path.is_absolute() {
                        path.clone()
                    } else {
                        base_dir.join(path)
                    };
                    let body = std::fs::read_to_string(&full).map_err(|e| {
                        ConfigError(format!("cannot read table {}: {e}", full.display()))
                    })?;
                    CoefficientProfile::from_csv_str(&body)
                        .map_err(|e| ConfigError(format!("{}: {e}", full.display())))?
                }
            })
        };
        let a = resolve(&self.coefficients.a)?;
        let d = resolve(&self.coefficients.d)?;
        let b = match &self.coefficients.b {
            Some(spec) => resolve(spec)?,
            None => CoefficientProfile::zero(),
        };
        // lambda is substituted later when given as a fraction of 1/C_HP
        CoefficientSet::new(a, b, d, 0.0).map_err(|e| ConfigError(e.to_string()))
    }
}
