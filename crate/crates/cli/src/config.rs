//! JSON run configuration.

use pnp_core::bvp::SolverOptions;
use pnp_core::transient::TransientOptions;
use pnp_core::{BoundaryData, ChannelProfile, IonSpecies, ProfileKind, SteadyProblem};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_MU: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub asymptotic: AsymptoticConfig,
    #[serde(default)]
    pub bvp: SolverOptions,
    #[serde(default)]
    pub layers: LayersConfig,
    #[serde(default)]
    pub transient: TransientConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub validate: ValidateConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_output_dir() -> String {
    "pnp-out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_geometry")]
    pub geometry: ProfileKind,
    /// Rescale `h` so that `∫ h = 1` before solving.
    #[serde(default)]
    pub normalize_volume: bool,
    pub species: IonSpecies,
    pub boundary: BoundaryData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Debye number; `mu = 1/sqrt(lambda)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

fn default_geometry() -> ProfileKind {
    ProfileKind::Constant { value: 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticConfig {
    /// Number of intervals of the output grid for the regular layer and
    /// composite profiles.
    pub samples: usize,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self { samples: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayersConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_max: Option<f64>,
    pub tol: f64,
}

impl Default for LayersConfig {
    fn default() -> Self {
        Self {
            xi_max: None,
            tol: pnp_core::fast::DEFAULT_LAYER_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `c_k(x) = lin_k(x) (1 + amplitude_k sin(mode pi x))`, with `lin_k`
    /// the linear interpolant of the boundary values.
    PerturbedLinear {
        amplitude1: f64,
        amplitude2: f64,
        mode: u32,
    },
    /// Independent uniform draws of `alpha_k c_k` in `(0, M]` at every node.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransientConfig {
    pub t_end: f64,
    pub initial: InitialCondition,
    pub options: TransientOptions,
}

impl Default for TransientConfig {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            initial: InitialCondition::PerturbedLinear {
                amplitude1: -0.2,
                amplitude2: -0.1,
                mode: 1,
            },
            options: TransientOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepAxis {
    Mu { values: Vec<f64> },
    Phi0 { values: Vec<f64> },
    /// Volume-normalized `Bump { base: 1, amplitude, width }`.
    BumpAmplitude {
        values: Vec<f64>,
        #[serde(default = "default_bump_width")]
        width: f64,
    },
    /// Volume-normalized `AffineArea { a: 1, b: slope }`.
    AffineSlope { values: Vec<f64> },
}

fn default_bump_width() -> f64 {
    0.15
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Mu { .. } => "mu",
            SweepAxis::Phi0 { .. } => "phi0",
            SweepAxis::BumpAmplitude { .. } => "bump_amplitude",
            SweepAxis::AffineSlope { .. } => "affine_slope",
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Mu { values }
            | SweepAxis::Phi0 { values }
            | SweepAxis::BumpAmplitude { values, .. }
            | SweepAxis::AffineSlope { values } => values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    #[default]
    Asymptotic,
    Bvp,
    Transient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    #[serde(default)]
    pub method: SweepMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Random draws per randomized check.
    pub random_cases: usize,
    /// Random transient runs in the invariant-region check.
    pub transient_runs: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            random_cases: 1000,
            transient_runs: 10,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Parses and validates a config, filling `mu` when neither `mu` nor
/// `lambda` is present.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if cfg.problem.mu.is_none() && cfg.problem.lambda.is_none() {
        cfg.problem.mu = Some(DEFAULT_MU);
    }
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        match (p.mu, p.lambda) {
            (Some(_), Some(_)) => return Err(invalid("exactly one of mu and lambda may be given")),
            (Some(mu), None) if !(mu >= 0.0 && mu.is_finite()) => {
                return Err(invalid(format!("mu = {mu} must be finite and >= 0")))
            }
            (None, Some(l)) if !(l > 0.0 && l.is_finite()) => {
                return Err(invalid(format!("lambda = {l} must be finite and positive")))
            }
            _ => {}
        }
        p.species
            .validate()
            .map_err(|e| invalid(format!("species: {e}")))?;
        p.boundary
            .validate()
            .map_err(|e| invalid(format!("boundary: {e}")))?;
        self.profile()?;
        self.bvp.validate().map_err(|e| invalid(format!("bvp: {e}")))?;
        self.transient
            .options
            .validate()
            .map_err(|e| invalid(format!("transient.options: {e}")))?;
        if !(self.transient.t_end > 0.0 && self.transient.t_end.is_finite()) {
            return Err(invalid("transient.t_end must be positive"));
        }
        if let InitialCondition::PerturbedLinear {
            amplitude1,
            amplitude2,
            ..
        } = self.transient.initial
        {
            if amplitude1.abs() >= 1.0 || amplitude2.abs() >= 1.0 {
                return Err(invalid("transient.initial amplitudes must lie in (-1, 1)"));
            }
        }
        if !(self.layers.tol > 0.0) {
            return Err(invalid("layers.tol must be positive"));
        }
        if let Some(x) = self.layers.xi_max {
            if !(x > 0.0 && x.is_finite()) {
                return Err(invalid("layers.xi_max must be positive"));
            }
        }
        if self.asymptotic.samples < 2 {
            return Err(invalid("asymptotic.samples must be at least 2"));
        }
        if let Some(sweep) = &self.sweep {
            let values = sweep.axis.values();
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(invalid("sweep.axis.values must be a non-empty list of numbers"));
            }
            if matches!(sweep.axis, SweepAxis::Mu { .. }) && values.iter().any(|v| *v < 0.0) {
                return Err(invalid("sweep mu values must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        match (self.problem.mu, self.problem.lambda) {
            (Some(mu), _) => mu,
            (None, Some(l)) => 1.0 / l.sqrt(),
            (None, None) => DEFAULT_MU,
        }
    }

    pub fn profile(&self) -> Result<ChannelProfile> {
        let p = ChannelProfile::new(self.problem.geometry.clone())
            .map_err(|e| invalid(format!("geometry: {e}")))?;
        if self.problem.normalize_volume {
            return p
                .normalize_volume()
                .map_err(|e| invalid(format!("geometry: {e}")));
        }
        Ok(p)
    }

    pub fn steady_problem(&self) -> Result<SteadyProblem> {
        let p = &self.problem;
        Ok(SteadyProblem::new(self.profile()?, p.species, p.boundary, self.mu())?)
    }
}
