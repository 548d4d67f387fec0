use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::trainer::TrainReport;
use crate::ansatz::{build_layered_pqc, build_loader_circuit, build_share_specify, Entangler, ShareSpecifySpec};
use crate::circuit::ParamCircuit;
use crate::data::{AssetData, PipelineConfig};
use crate::error::{Error, Result};
use crate::simulator::layout::QubitLayout;

/// Circuit family and shape; enough to rebuild the circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelArch {
    Loader {
        qubits: usize,
        layers: usize,
    },
    Qstl {
        context_bits: usize,
        prediction_bits: usize,
        layers: usize,
        sublayers: usize,
        entangler: Entangler,
    },
    Qmtl {
        spec: ShareSpecifySpec,
    },
}

impl ModelArch {
    pub fn build(&self) -> Result<ParamCircuit> {
        match self {
            ModelArch::Loader { qubits, layers } => build_loader_circuit(*qubits, *layers),
            ModelArch::Qstl {
                context_bits,
                prediction_bits,
                layers,
                sublayers,
                entangler,
            } => build_layered_pqc(context_bits + prediction_bits, *layers, *sublayers, *entangler),
            ModelArch::Qmtl { spec } => build_share_specify(spec),
        }
    }

    /// Context bits (0 for a loader).
    pub fn context_bits(&self) -> usize {
        match self {
            ModelArch::Loader { .. } => 0,
            ModelArch::Qstl { context_bits, .. } => *context_bits,
            ModelArch::Qmtl { spec } => spec.t * spec.bits_per_symbol,
        }
    }

    pub fn prediction_bits(&self) -> usize {
        match self {
            ModelArch::Loader { qubits, .. } => *qubits,
            ModelArch::Qstl { prediction_bits, .. } => *prediction_bits,
            ModelArch::Qmtl { spec } => spec.tau * spec.bits_per_symbol,
        }
    }

    /// Bits per symbol of the prediction register.
    pub fn bits_per_symbol(&self) -> usize {
        match self {
            ModelArch::Qmtl { spec } => spec.bits_per_symbol,
            _ => 1,
        }
    }

    pub fn label_width(&self) -> usize {
        match self {
            ModelArch::Qmtl { spec } => spec.label_width(),
            _ => 0,
        }
    }

    pub fn assets(&self) -> usize {
        match self {
            ModelArch::Qmtl { spec } => spec.k,
            _ => 1,
        }
    }
}

/// Trained model file: architecture, parameters, circuit hash, and the
/// per-asset data the model was trained on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub arch: ModelArch,
    pub params: Vec<f64>,
    pub circuit_hash: String,
    pub assets: Vec<AssetData>,
    pub config: TrainConfig,
    /// Preprocessing that produced `assets`, when they came from prices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineConfig>,
}

impl Model {
    pub fn new(arch: ModelArch, params: Vec<f64>, assets: Vec<AssetData>, config: TrainConfig) -> Result<Self> {
        let circuit = arch.build()?;
        circuit.check_params(&params)?;
        Ok(Model {
            arch,
            params,
            circuit_hash: circuit.hash(),
            assets,
            config,
            pipeline: None,
        })
    }

    pub fn from_report(report: &TrainReport, assets: Vec<AssetData>) -> Result<Self> {
        Self::new(report.arch.clone(), report.final_params.clone(), assets, report.config.clone())
    }

    pub fn with_pipeline(mut self, pipeline: PipelineConfig) -> Self {
        self.pipeline = Some(pipeline);
        self
    }

    /// Register layout of the model circuit.
    pub fn layout(&self) -> QubitLayout {
        QubitLayout::model(self.arch.context_bits(), self.arch.prediction_bits(), self.arch.label_width())
    }

    pub fn circuit(&self) -> Result<ParamCircuit> {
        let c = self.arch.build()?;
        if c.hash() != self.circuit_hash {
            return Err(Error::Config(
                "model circuit hash does not match its architecture".into(),
            ));
        }
        c.check_params(&self.params)?;
        Ok(c)
    }

    /// Index of `asset` (by id or decimal label).
    pub fn asset_index(&self, asset: &str) -> Result<usize> {
        if let Some(i) = self.assets.iter().position(|a| a.asset_id == asset) {
            return Ok(i);
        }
        match asset.parse::<usize>() {
            Ok(k) if k < self.arch.assets() => Ok(k),
            _ => Err(Error::Config(format!("unknown asset '{asset}'"))),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::io::write_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: Model = crate::io::read_json(path)?;
        model.circuit()?;
        Ok(model)
    }
}
