//! Price ingestion, preprocessing, quantization and empirical distributions.

pub mod dist;
pub mod prices;
pub mod quantize;
pub mod synthetic;

use serde::{Deserialize, Serialize};

pub use dist::{conditional_slice, empirical_dist, Counts, EmpiricalDist};
pub use prices::{diff_and_smooth, diff_and_smooth_ordered, ingest_csv, PriceSeries, SmoothOrder};
pub use quantize::{fit_quantizer, quantize, split_train_test, QuantMode, QuantizerSpec, SymbolSeries};

use crate::error::{Error, Result};

/// Preprocessing knobs shared by every asset in a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub window: usize,
    pub stride: usize,
    pub order: SmoothOrder,
    pub d: usize,
    pub mode: QuantMode,
    /// Context length in symbols.
    pub t: usize,
    /// Prediction length in symbols.
    pub tau: usize,
    /// Training fraction of the symbol series.
    pub split: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window: 5,
            stride: 1,
            order: SmoothOrder::DiffThenAverage,
            d: 2,
            mode: QuantMode::Sign,
            t: 3,
            tau: 1,
            split: 0.8,
        }
    }
}

/// Everything a trainer needs about one asset: the joint distribution over
/// `t + tau` symbols and the quantizer that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssetData {
    pub asset_id: String,
    /// Context length in bits.
    pub context_bits: usize,
    /// Joint over context followed by continuation.
    pub joint: EmpiricalDist,
    pub quantizer: Option<QuantizerSpec>,
}

impl AssetData {
    pub fn from_joint(asset_id: impl Into<String>, joint: EmpiricalDist, context_bits: usize) -> Result<Self> {
        if context_bits == 0 || context_bits >= joint.width() {
            return Err(Error::invalid(format!(
                "context of {context_bits} bits does not fit a {}-bit joint",
                joint.width()
            )));
        }
        Ok(AssetData {
            asset_id: asset_id.into(),
            context_bits,
            joint,
            quantizer: None,
        })
    }

    /// Runs the full pipeline on the training split of `series`. The
    /// quantizer is fitted on the training returns only.
    pub fn from_prices(series: &PriceSeries, cfg: &PipelineConfig) -> Result<Self> {
        let returns = diff_and_smooth_ordered(&series.prices, cfg.window, cfg.stride, cfg.order)?;
        let cut = (cfg.split * returns.len() as f64).floor() as usize;
        if !(cfg.split > 0.0 && cfg.split < 1.0) || cut < cfg.t + cfg.tau {
            return Err(Error::invalid(format!(
                "training split {} leaves too few returns",
                cfg.split
            )));
        }
        let train = &returns[..cut];
        let quantizer = fit_quantizer(train, cfg.d, cfg.mode)?;
        let symbols = quantize(train, &quantizer);
        let joint = empirical_dist(&symbols, cfg.t + cfg.tau)?;
        Ok(AssetData {
            asset_id: series.asset_id.clone(),
            context_bits: cfg.t * symbols.bits_per_symbol(),
            joint,
            quantizer: Some(quantizer),
        })
    }

    /// Joint over the held-out part of `series` (after the training split),
    /// quantized with this asset's fitted quantizer.
    pub fn held_out(&self, series: &PriceSeries, cfg: &PipelineConfig) -> Result<Self> {
        let quantizer = self
            .quantizer
            .as_ref()
            .ok_or_else(|| Error::Config(format!("asset '{}' has no fitted quantizer", self.asset_id)))?;
        let returns = diff_and_smooth_ordered(&series.prices, cfg.window, cfg.stride, cfg.order)?;
        let cut = (cfg.split * returns.len() as f64).floor() as usize;
        let symbols = quantize(&returns[cut.min(returns.len())..], quantizer);
        let window = self.joint.width() / symbols.bits_per_symbol();
        if symbols.len() < window {
            return Err(Error::DegenerateData(format!(
                "held-out part of '{}' has {} symbols, fewer than one window",
                series.asset_id,
                symbols.len()
            )));
        }
        Ok(AssetData {
            asset_id: self.asset_id.clone(),
            context_bits: self.context_bits,
            joint: empirical_dist(&symbols, window)?,
            quantizer: Some(quantizer.clone()),
        })
    }

    pub fn prediction_bits(&self) -> usize {
        self.joint.width() - self.context_bits
    }

    /// Marginal over the context bits.
    pub fn context_dist(&self) -> EmpiricalDist {
        let keep: Vec<usize> = (0..self.context_bits).collect();
        self.joint.marginal(&keep).expect("context bits lie inside the joint")
    }

    /// Distribution export with metadata.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "asset_id": self.asset_id,
            "context_bits": self.context_bits,
            "prediction_bits": self.prediction_bits(),
            "d": self.quantizer.as_ref().map(|q| q.d),
            "quantizer": self.quantizer,
            "probs": self.joint.to_map(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_recomposes_joint() {
        let joint = EmpiricalDist::from_dense(
            3,
            vec![0.1, 0.05, 0.0, 0.15, 0.2, 0.1, 0.3, 0.1],
        )
        .unwrap();
        let a = AssetData::from_joint("x", joint.clone(), 2).unwrap();
        let ctx = a.context_dist();
        for c in 0..4 {
            let bits = dist::gather_bits(c, 2, &[0, 1]);
            let cond = conditional_slice(&joint, &crate::simulator::state::format_bits(bits, 2)).unwrap();
            for n in 0..2 {
                let rebuilt = ctx.prob(c) * cond.prob(n);
                assert!((rebuilt - joint.prob(c << 1 | n)).abs() < 1e-12);
            }
        }
    }
}
