//! Declarative run configuration read from TOML.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::Mode;
use crate::antenna::AntennaPattern;
use crate::error::Error;
use crate::model::{EnvironmentParams, NetworkConfig, Scheme, SchemeConfig};
use crate::montecarlo::SimConfig;
use crate::optimizer::{grid_points, Objective, TiltSearchSpec};

use super::CliError;

/// Which estimator produces the numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Analytic,
    Mc,
    Both,
}

impl MethodChoice {
    pub fn analytic(self) -> bool {
        matches!(self, MethodChoice::Analytic | MethodChoice::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, MethodChoice::Mc | MethodChoice::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub mode: Mode,
    pub method: MethodChoice,
}

/// Parameter swept by `sweep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Both tilts at once (the single IS tilt).
    Tilt,
    TiltG,
    TiltA,
    RhoBg,
    LambdaB,
    InterferenceFraction,
    RhoG,
    HB,
    HA,
    GammaT,
    Noise,
    PT,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Tilt => "tilt",
            Axis::TiltG => "tilt_g",
            Axis::TiltA => "tilt_a",
            Axis::RhoBg => "rho_bg",
            Axis::LambdaB => "lambda_b",
            Axis::InterferenceFraction => "interference_fraction",
            Axis::RhoG => "rho_g",
            Axis::HB => "h_b",
            Axis::HA => "h_a",
            Axis::GammaT => "gamma_t",
            Axis::Noise => "noise",
            Axis::PT => "p_t",
        }
    }

    /// Copy of `cfg` with this parameter set to `v`.
    pub fn apply(self, cfg: &RunConfig, v: f64) -> RunConfig {
        let mut c = cfg.clone();
        match self {
            Axis::Tilt => {
                c.scheme.tilt_g = v;
                c.scheme.tilt_a = v;
            }
            Axis::TiltG => c.scheme.tilt_g = v,
            Axis::TiltA => c.scheme.tilt_a = v,
            Axis::RhoBg => c.scheme.rho_bg = v,
            Axis::LambdaB => c.network.lambda_b = v,
            Axis::InterferenceFraction => c.network.interference_fraction = v,
            Axis::RhoG => c.network.rho_g = v,
            Axis::HB => c.network.h_b = v,
            Axis::HA => c.network.h_a = v,
            Axis::GammaT => c.network.gamma_t = v,
            Axis::Noise => c.network.noise = v,
            Axis::PT => c.network.p_t = v,
        }
        c
    }
}

/// Sweep axis: explicit `values`, or `start`/`stop`/`step`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axis: Option<Axis>,
    pub values: Vec<f64>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

impl SweepSection {
    pub fn points(&self) -> Result<Vec<f64>, Error> {
        let pts = match (self.start, self.stop, self.step) {
            (None, None, None) => self.values.clone(),
            (Some(a), Some(b), Some(s)) if self.values.is_empty() => {
                if !(s > 0.0 && a.is_finite() && b.is_finite() && b >= a) {
                    return Err(Error::invalid("sweep.step", "needs finite start <= stop and step > 0"));
                }
                grid_points(a, b, s)
            }
            _ => return Err(Error::invalid("sweep", "give either values or all of start, stop, step")),
        };
        if pts.is_empty() {
            return Err(Error::invalid("sweep.values", "axis has no points"));
        }
        if pts.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep.values", "values must be finite"));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioSection {
    pub grid: Vec<f64>,
}

impl Default for RatioSection {
    fn default() -> Self {
        Self {
            grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    /// Density bracket in BS/m².
    pub bracket: [f64; 2],
}

impl Default for CriticalSection {
    fn default() -> Self {
        Self { bracket: [1e-6, 2e-4] }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub network: NetworkConfig,
    pub environment: EnvironmentParams,
    pub antenna: AntennaPattern,
    pub scheme: SchemeConfig,
    pub sim: SimConfig,
    pub optimizer: TiltSearchSpec,
    pub sweep: SweepSection,
    pub ratio: RatioSection,
    pub critical: CriticalSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.network.validate()?;
        self.environment.validate()?;
        self.antenna.validate()?;
        self.scheme.validate()?;
        self.sim.validate()?;
        self.optimizer.validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn sha256(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Optimizer settings with the run mode and the requested objective.
    pub fn search_spec(&self, method: MethodChoice) -> Result<TiltSearchSpec, Error> {
        let objective = match method {
            MethodChoice::Analytic => Objective::Analytic,
            MethodChoice::Mc => Objective::MonteCarlo(self.sim),
            MethodChoice::Both => return Err(Error::invalid("run.method", "optimizers take a single objective: analytic or mc")),
        };
        Ok(TiltSearchSpec {
            mode: self.run.mode,
            objective,
            ..self.optimizer
        })
    }

    /// Copy with the scheme tilts normalized for IS (one tilt).
    pub fn scheme(&self) -> SchemeConfig {
        match self.scheme.scheme {
            Scheme::Inclusive => SchemeConfig {
                tilt_a: self.scheme.tilt_g,
                ..self.scheme
            },
            Scheme::Exclusive => self.scheme,
        }
    }
}
