//! Multi-step forecasts: exact path enumeration against sampled episodes for
//! one asset, then a weighted two-asset portfolio.

use cqnn::ansatz::ShareSpecifySpec;
use cqnn::data::{ingest_csv, AssetData, PipelineConfig};
use cqnn::inference::{portfolio_rollout, sequential_rollout, RolloutMode};
use cqnn::training::{train_qmtl, Model, TrainConfig};

fn main() -> cqnn::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let assets = ["pair_a", "pair_b"]
        .iter()
        .map(|n| AssetData::from_prices(&ingest_csv(format!("{dir}/{n}.csv"))?, &PipelineConfig::default()))
        .collect::<cqnn::Result<Vec<_>>>()?;
    let report = train_qmtl(&assets, &ShareSpecifySpec::new(3, 1, 2, 1, 2), &TrainConfig::default())?;
    let model = Model::from_report(&report, assets)?;
    let (circuit, layout) = (model.circuit()?, model.layout());

    let exact = sequential_rollout(&circuit, &model.params, &layout, "110", Some(0), 3, RolloutMode::Exact { qubit_budget: 20 })?;
    let sampled = sequential_rollout(
        &circuit,
        &model.params,
        &layout,
        "110",
        Some(0),
        3,
        RolloutMode::Sampled { episodes: 100_000, seed: 7 },
    )?;
    println!("pair_a from 110, three steps");
    for ((path, p), q) in exact.to_map().iter().zip(sampled.probs()) {
        println!("  {path}  exact {p:.4}  sampled {q:.4}");
    }
    println!("  total variation {:.4}", exact.total_variation(&sampled)?);

    let contexts = vec!["110".to_string(), "001".to_string()];
    let p = portfolio_rollout(&circuit, &model.params, &layout, &contexts, &[3.0, 1.0], 2, RolloutMode::Exact { qubit_budget: 20 })?;
    println!("\nportfolio weights {:?}", p.weights);
    for (k, d) in p.paths.iter().enumerate() {
        if let Some(d) = d {
            println!("  label {k}: {:?}", d.to_map());
        }
    }
    Ok(())
}
