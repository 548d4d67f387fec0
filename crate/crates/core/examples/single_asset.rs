//! Train a single-asset model and print the learned next-move distribution
//! for every context next to the empirical one.

use cqnn::data::{conditional_slice, ingest_csv, AssetData, PipelineConfig};
use cqnn::inference::{predict_conditional, weighted_conditional_kl};
use cqnn::training::{train_qstl, Model, TrainConfig};

fn main() -> cqnn::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_prices.csv").into());
    let pipeline = PipelineConfig::default();
    let asset = AssetData::from_prices(&ingest_csv(&path)?, &pipeline)?;
    let report = train_qstl(&asset, 4, &TrainConfig::default())?;
    let model = Model::from_report(&report, vec![asset.clone()])?.with_pipeline(pipeline);
    let circuit = model.circuit()?;

    println!("{} parameters, batch KL {:.4}\n", circuit.n_params(), report.kl_per_asset[&asset.asset_id]);
    println!("ctx   weight  P(up) data  P(up) model  E[move]");
    for (ctx, w) in asset.context_dist().to_map() {
        if w == 0.0 {
            continue;
        }
        let data = conditional_slice(&asset.joint, &ctx)?;
        let pred = predict_conditional(&circuit, &model.params, &model.layout(), &ctx, None, asset.quantizer.as_ref())?;
        println!(
            "{ctx}   {w:.3}   {:.3}        {:.3}        {:+.4}",
            data.prob(1),
            pred.next_dist.prob(1),
            pred.expected_movement.unwrap_or(f64::NAN)
        );
    }

    // Same model, scored against the readback-conditioned basis predictions.
    let basis = cqnn::inference::basis_model_joint(&circuit, &model.params, &model.layout(), &asset.context_dist(), None)?;
    println!("\nbasis-input KL {:.4}", weighted_conditional_kl(&asset.joint, &basis, asset.context_bits)?);
    Ok(())
}
