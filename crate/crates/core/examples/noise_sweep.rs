//! Divergence of a trained circuit's noisy predictions from its noiseless
//! ones, for gate (depolarizing) and measurement (readout) errors.

use cqnn::data::{ingest_csv, AssetData, PipelineConfig};
use cqnn::inference::basis_index;
use cqnn::noise::{noise_sweep, NoiseKind};
use cqnn::simulator::Statevector;
use cqnn::training::{train_qstl, Model, TrainConfig};

fn main() -> cqnn::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_prices.csv");
    let asset = AssetData::from_prices(&ingest_csv(path)?, &PipelineConfig::default())?;
    let model = Model::from_report(&train_qstl(&asset, 4, &TrainConfig::default())?, vec![asset.clone()])?;
    let (circuit, layout) = (model.circuit()?, model.layout());

    // Most frequent context as a basis input.
    let ctx = asset.context_dist();
    let top = (0..ctx.probs().len()).max_by(|&a, &b| ctx.prob(a).total_cmp(&ctx.prob(b))).unwrap_or(0);
    let input = Statevector::basis(layout.model_width(), basis_index(&layout, top, None)?)?;
    let measured: Vec<usize> = layout.prediction.clone().collect();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 20.0).collect();

    println!("   p    depolarizing   readout");
    let dep = noise_sweep(&circuit, &model.params, &input, &measured, &grid, NoiseKind::Depolarizing, 100_000, 100, 42)?;
    let ro = noise_sweep(&circuit, &model.params, &input, &measured, &grid, NoiseKind::Readout, 100_000, 100, 42)?;
    for (d, r) in dep.iter().zip(&ro) {
        println!("{:5.2}   {:.5}        {:.5}", d.p, d.kl, r.kl);
    }
    Ok(())
}
