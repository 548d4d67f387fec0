use std::path::Path;
use std::str::FromStr;

use crate::ansatz::{Entangler, LabelMode, ShareSpecifySpec};
use crate::data::{PipelineConfig, QuantMode, SmoothOrder};
use crate::error::{Error, Result};
use crate::inference::DEFAULT_QUBIT_BUDGET;
use crate::noise::DEFAULT_TRAJECTORIES;
use crate::training::{GradEstimator, InitScheme, LossKind, TrainConfig};

/// Every tunable of a command-line run. Read from a flat `key = value` file
/// (`#` starts a comment), then overridden by flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub train: TrainConfig,
    pub layers: usize,
    pub mtl_layers: usize,
    pub label_mode: LabelMode,
    pub trajectories: usize,
    pub noise_shots: u64,
    pub qubit_budget: usize,
    pub episodes: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pipeline: PipelineConfig::default(),
            train: TrainConfig::default(),
            layers: 4,
            mtl_layers: 1,
            label_mode: LabelMode::Direct,
            trajectories: DEFAULT_TRAJECTORIES,
            noise_shots: 100_000,
            qubit_budget: DEFAULT_QUBIT_BUDGET,
            episodes: 100_000,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("bad value '{value}' for '{key}' (true|false)"))),
    }
}

fn snake<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("enum keys serialize as strings"),
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (p, t) = (&mut self.pipeline, &mut self.train);
        match key {
            "window" => p.window = parse(key, value)?,
            "stride" => p.stride = parse(key, value)?,
            "order" => p.order = SmoothOrder::from_str(value)?,
            "d" => p.d = parse(key, value)?,
            "mode" => p.mode = QuantMode::from_str(value)?,
            "t" => p.t = parse(key, value)?,
            "tau" => p.tau = parse(key, value)?,
            "split" => p.split = parse(key, value)?,
            "epochs" => t.epochs = parse(key, value)?,
            "learning_rate" => t.learning_rate = parse(key, value)?,
            "spsa_delta" => t.spsa_delta = parse(key, value)?,
            "shots" => t.shots = parse(key, value)?,
            "seed" => t.seed = parse(key, value)?,
            "grad_estimator" => t.grad_estimator = GradEstimator::from_str(value)?,
            "loss" => t.loss = LossKind::from_str(value)?,
            "init" => t.init = InitScheme::from_str(value)?,
            "sublayers" => t.sublayers = parse(key, value)?,
            "entangler" => t.entangler = Entangler::from_str(value)?,
            "block_epochs" => t.block_epochs = parse(key, value)?,
            "context_twirl" => t.context_twirl = parse_bool(key, value)?,
            "layers" => self.layers = parse(key, value)?,
            "mtl_layers" => self.mtl_layers = parse(key, value)?,
            "label_mode" => self.label_mode = LabelMode::from_str(value)?,
            "trajectories" => self.trajectories = parse(key, value)?,
            "noise_shots" => self.noise_shots = parse(key, value)?,
            "qubit_budget" => self.qubit_budget = parse(key, value)?,
            "episodes" => self.episodes = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` assignments in order.
    pub fn apply<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{pair}'")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.apply([line])
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }

    /// All keys in a fixed order; parsing this text gives back `self`.
    pub fn to_text(&self) -> String {
        let (p, t) = (&self.pipeline, &self.train);
        let rows: Vec<(&str, String)> = vec![
            ("window", p.window.to_string()),
            ("stride", p.stride.to_string()),
            ("order", snake(&p.order)),
            ("d", p.d.to_string()),
            ("mode", snake(&p.mode)),
            ("t", p.t.to_string()),
            ("tau", p.tau.to_string()),
            ("split", p.split.to_string()),
            ("epochs", t.epochs.to_string()),
            ("learning_rate", t.learning_rate.to_string()),
            ("spsa_delta", t.spsa_delta.to_string()),
            ("shots", t.shots.to_string()),
            ("seed", t.seed.to_string()),
            ("grad_estimator", snake(&t.grad_estimator)),
            ("loss", snake(&t.loss)),
            ("init", snake(&t.init)),
            ("sublayers", t.sublayers.to_string()),
            ("entangler", snake(&t.entangler)),
            ("block_epochs", t.block_epochs.to_string()),
            ("context_twirl", t.context_twirl.to_string()),
            ("layers", self.layers.to_string()),
            ("mtl_layers", self.mtl_layers.to_string()),
            ("label_mode", snake(&self.label_mode)),
            ("trajectories", self.trajectories.to_string()),
            ("noise_shots", self.noise_shots.to_string()),
            ("qubit_budget", self.qubit_budget.to_string()),
            ("episodes", self.episodes.to_string()),
        ];
        rows.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.pipeline;
        if p.t == 0 || p.tau == 0 {
            return Err(Error::Config(format!("T and tau must be positive (got T={}, tau={})", p.t, p.tau)));
        }
        if p.window == 0 || p.stride == 0 {
            return Err(Error::Config("window and stride must be positive".into()));
        }
        if p.d < 2 || !p.d.is_power_of_two() {
            return Err(Error::Config(format!("d must be a power of two >= 2, got {}", p.d)));
        }
        if p.mode == QuantMode::Sign && p.d != 2 {
            return Err(Error::Config("sign quantization needs d = 2".into()));
        }
        if !(p.split > 0.0 && p.split < 1.0) {
            return Err(Error::Config(format!("split must lie in (0, 1), got {}", p.split)));
        }
        if self.layers == 0 || self.mtl_layers == 0 {
            return Err(Error::Config("layer counts must be positive".into()));
        }
        if self.trajectories == 0 || self.episodes == 0 {
            return Err(Error::Config("trajectories and episodes must be positive".into()));
        }
        self.train.validate()
    }

    /// Share-and-specify shape for `k` assets.
    pub fn mtl_spec(&self, k: usize) -> ShareSpecifySpec {
        ShareSpecifySpec {
            entangler: self.train.entangler,
            bits_per_symbol: self.pipeline.d.trailing_zeros() as usize,
            label_mode: self.label_mode,
            ..ShareSpecifySpec::new(self.pipeline.t, self.pipeline.tau, k, self.mtl_layers, self.train.sublayers)
        }
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let path = dir.as_ref().join("config.txt");
        std::fs::write(&path, self.to_text()).map_err(|e| Error::io(&path, e))
    }
}
