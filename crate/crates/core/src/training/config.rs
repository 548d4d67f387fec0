use serde::{Deserialize, Serialize};

use crate::ansatz::Entangler;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradEstimator {
    #[default]
    Spsa,
    ParameterShift,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `(1 - |<target|out>|^2) / 2`, estimated by a swap test when sampling.
    #[default]
    Fidelity,
    /// Squared error between full-register outcome distributions.
    Mse,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Uniform in `[-pi, pi)` from the run seed.
    #[default]
    Uniform,
    Zeros,
}

macro_rules! from_str_enum {
    ($ty:ty, $what:literal, { $($s:literal => $v:expr),+ $(,)? }) => {
        impl std::str::FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(Error::Config(format!(
                        concat!("unknown ", $what, " '{}' (", $($s, "|",)+ ")"), s
                    ))),
                }
            }
        }
    };
}

from_str_enum!(GradEstimator, "gradient estimator", {
    "spsa" => GradEstimator::Spsa,
    "parameter_shift" => GradEstimator::ParameterShift,
});
from_str_enum!(LossKind, "loss", { "fidelity" => LossKind::Fidelity, "mse" => LossKind::Mse });
from_str_enum!(InitScheme, "init scheme", { "uniform" => InitScheme::Uniform, "zeros" => InitScheme::Zeros });

/// Hyperparameters of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub spsa_delta: f64,
    /// Measurement shots per loss evaluation; 0 evaluates the loss exactly.
    pub shots: u64,
    pub seed: u64,
    pub grad_estimator: GradEstimator,
    pub loss: LossKind,
    pub init: InitScheme,
    /// Rotation rounds per layer.
    pub sublayers: usize,
    pub entangler: Entangler,
    /// Epochs per asset block in multi-asset training (round-robin in label order).
    pub block_epochs: usize,
    /// Average the loss over all `(-1)^(s.x)` sign patterns on the context
    /// register. Off by default.
    pub context_twirl: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 3000,
            learning_rate: 0.1,
            spsa_delta: 0.01,
            shots: 10_000,
            seed: 42,
            grad_estimator: GradEstimator::Spsa,
            loss: LossKind::Fidelity,
            init: InitScheme::Uniform,
            sublayers: 2,
            entangler: Entangler::Ring,
            block_epochs: 250,
            context_twirl: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.spsa_delta > 0.0 && self.spsa_delta <= 1.0) {
            return Err(Error::Config(format!(
                "SPSA delta must lie in (0, 1], got {}",
                self.spsa_delta
            )));
        }
        if self.sublayers == 0 || self.block_epochs == 0 {
            return Err(Error::Config("sublayers and block epochs must be positive".into()));
        }
        Ok(())
    }

    /// Same settings with exact loss evaluation.
    pub fn exact(mut self) -> Self {
        self.shots = 0;
        self
    }
}
