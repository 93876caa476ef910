//! JSON run configurations and the shipped figure presets.
//!
//! Parsing is strict: unknown keys are rejected at every level.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{initial_coefficients, InitialFamily};
use crate::propagator::{BathSpec, PropagatorParams};
use crate::sector::{CouplingProfile, SectorState};

/// Largest qubit count accepted where dense `2ⁿ` matrices are built.
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<CouplingsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BathConfig {
    Physical(PhysicalBath),
    Ratio(RatioBath),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBath {
    pub gamma: f64,
    pub lambda: f64,
}

/// `γ = 1`, `r = R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioBath {
    #[serde(rename = "R")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingsConfig {
    /// Raw couplings `α_j`; weights are normalized automatically.
    List(Vec<f64>),
    Named(NamedCouplings),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedCouplings {
    Alphas(Vec<f64>),
    /// Three qubits with `r₃ = √(1 − r₁² − r₂²)`.
    R12([f64; 2]),
    Uniform(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Family(InitialFamily),
    Explicit(ExplicitInitial),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitInitial {
    /// `[re, im]` per qubit.
    pub amplitudes: Vec<[f64; 2]>,
    /// Real `|g…g⟩` amplitude; `√(1 − Q)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnits {
    InvR,
    InvGamma,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub steps: usize,
    pub units: TimeUnits,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t_max: 100.0, steps: 2001, units: TimeUnits::InvR }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub nqubit: NQubitConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Grid points per axis on `[0, 1]`.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Restrict to the diagonal `r₁ = r₂`.
    #[serde(default)]
    pub diagonal_only: bool,
}

fn default_resolution() -> usize {
    101
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { resolution: default_resolution(), diagonal_only: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NQubitConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Couplings; defaults to `(1, 2, 1, …, 1)` so that qubit 2 is the most
    /// strongly coupled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default = "default_eta_plus")]
    pub eta_plus: f64,
    #[serde(default = "default_eta_minus")]
    pub eta_minus: f64,
}

fn default_n() -> usize {
    5
}
fn default_eta_plus() -> f64 {
    0.8
}
fn default_eta_minus() -> f64 {
    0.6
}

impl Default for NQubitConfig {
    fn default() -> Self {
        Self { n: default_n(), alphas: None, eta_plus: default_eta_plus(), eta_minus: default_eta_minus() }
    }
}

impl NQubitConfig {
    pub fn profile(&self) -> Result<CouplingProfile> {
        if !(2..=MAX_DENSE_QUBITS).contains(&self.n) {
            return Err(Error::Config(format!(
                "nqubit needs 2 <= n <= {MAX_DENSE_QUBITS}, got n={}",
                self.n
            )));
        }
        let alphas = match &self.alphas {
            Some(a) if a.len() != self.n => {
                return Err(Error::Config(format!("nqubit.alphas has {} entries, n={}", a.len(), self.n)))
            }
            Some(a) => a.clone(),
            None => (0..self.n).map(|j| if j == 1 { 2.0 } else { 1.0 }).collect(),
        };
        CouplingProfile::new(alphas).map_err(config_err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// RK4 on the local second-order equation for `c₊`.
    Ode,
    /// Explicit Lorentzian bath modes.
    Bath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_kind")]
    pub kind: OracleKind,
    /// Integrator step in absolute time; defaults depend on `kind`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

fn default_kind() -> OracleKind {
    OracleKind::Ode
}
fn default_modes() -> usize {
    4001
}
fn default_half_width() -> f64 {
    40.0
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { kind: default_kind(), dt: None, modes: default_modes(), half_width: default_half_width() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn profile(&self) -> Result<CouplingProfile> {
        let c = self.couplings.as_ref().ok_or_else(|| Error::Config("`couplings` is required".into()))?;
        match c {
            CouplingsConfig::List(a) | CouplingsConfig::Named(NamedCouplings::Alphas(a)) => {
                CouplingProfile::new(a.clone())
            }
            CouplingsConfig::Named(NamedCouplings::R12([r1, r2])) => CouplingProfile::from_r12(*r1, *r2),
            CouplingsConfig::Named(NamedCouplings::Uniform(n)) => CouplingProfile::uniform(*n),
        }
        .map_err(config_err)
    }

    /// Propagator parameters for a given coupling profile.
    pub fn params_for(&self, profile: &CouplingProfile) -> Result<PropagatorParams> {
        match self.bath {
            BathConfig::Ratio(RatioBath { ratio }) => PropagatorParams::from_ratio(ratio),
            BathConfig::Physical(PhysicalBath { gamma, lambda }) => {
                let bath = BathSpec::new(lambda, gamma, 0.0)?;
                PropagatorParams::from_bath(&bath, profile.alpha_total())
            }
        }
        .map_err(config_err)
    }

    /// Parsed initial state. Shape problems are configuration errors; a
    /// normalization violation is left for the numerical layer to report.
    pub fn initial_state(&self) -> Result<SectorState> {
        let init = self.initial.as_ref().ok_or_else(|| Error::Config("`initial` is required".into()))?;
        match init {
            InitialConfig::Family(f) => initial_coefficients(f).map_err(config_err),
            InitialConfig::Explicit(e) => {
                let a: Vec<Complex64> = e.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                let q: f64 = a.iter().map(|z| z.norm_sqr()).sum();
                let g = match e.ground {
                    Some(g) if g < 0.0 => {
                        return Err(Error::Config("`initial.ground` must be >= 0".into()))
                    }
                    Some(g) => g,
                    None => (1.0 - q).max(0.0).sqrt(),
                };
                SectorState::new(a, Complex64::new(g, 0.0)).map_err(config_err)
            }
        }
    }

    /// Absolute sample times `t_i = i/(steps−1) · t_max · unit`.
    pub fn times(&self, params: &PropagatorParams) -> Result<Vec<f64>> {
        let TimeConfig { t_max, steps, units } = self.time;
        if steps < 2 {
            return Err(Error::Config(format!("time.steps must be >= 2, got {steps}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Config(format!("time.t_max must be positive, got {t_max}")));
        }
        let unit = match units {
            TimeUnits::Absolute => 1.0,
            TimeUnits::InvR if params.r() > 0.0 => 1.0 / params.r(),
            TimeUnits::InvGamma if params.gamma() > 0.0 => 1.0 / params.gamma(),
            _ => return Err(Error::Config(format!("time unit {units:?} is undefined for these parameters"))),
        };
        let span = t_max * unit;
        let last = (steps - 1) as f64;
        Ok((0..steps).map(|i| span * (i as f64 / last)).collect())
    }
}

/// Names of the shipped presets: `fig1{a,b,c,d}_{solid,dashed,dashdot}`.
pub const PRESETS: [&str; 12] = [
    "fig1a_solid",
    "fig1a_dashed",
    "fig1a_dashdot",
    "fig1b_solid",
    "fig1b_dashed",
    "fig1b_dashdot",
    "fig1c_solid",
    "fig1c_dashed",
    "fig1c_dashdot",
    "fig1d_solid",
    "fig1d_dashed",
    "fig1d_dashdot",
];

/// Panels a/b sit in the bad cavity (`R = 0.1`), c/d in the good cavity
/// (`R = 10`); a/c start from `|egg⟩` (`p = 1`), b/d from W (`p = 0`).
/// The three line styles are the optimized profile for that initial state,
/// uniform coupling, and a single coupled qubit.
pub fn preset(name: &str) -> Option<RunConfig> {
    let (panel, style) = name.strip_prefix("fig1")?.split_once('_')?;
    let (ratio, p, t_max) = match panel {
        "a" => (0.1, 1.0, 100.0),
        "b" => (0.1, 0.0, 100.0),
        "c" => (10.0, 1.0, 60.0),
        "d" => (10.0, 0.0, 60.0),
        _ => return None,
    };
    let couplings = match style {
        "solid" if p == 1.0 => NamedCouplings::R12([0.53, 0.6]),
        "solid" => NamedCouplings::R12([0.11, 0.11]),
        "dashed" => NamedCouplings::Uniform(3),
        "dashdot" => NamedCouplings::Alphas(vec![1.0, 0.0, 0.0]),
        _ => return None,
    };
    Some(RunConfig {
        bath: BathConfig::Ratio(RatioBath { ratio }),
        couplings: Some(CouplingsConfig::Named(couplings)),
        initial: Some(InitialConfig::Family(InitialFamily { p, theta: 0.0, phi: 0.0 })),
        time: TimeConfig { t_max, steps: 2001, units: TimeUnits::InvR },
        mode: ModeConfig::default(),
        output: OutputConfig::default(),
    })
}
