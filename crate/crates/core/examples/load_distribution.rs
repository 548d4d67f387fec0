//! Train the loader circuit so that measuring it reproduces the context
//! distribution of a price file.
//!
//! ```text
//! cargo run --release --example load_distribution -- [prices.csv]
//! ```

use cqnn::data::{ingest_csv, AssetData, PipelineConfig};
use cqnn::training::{train_distribution_loader, TrainConfig};

fn main() -> cqnn::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_prices.csv").into());
    let asset = AssetData::from_prices(&ingest_csv(&path)?, &PipelineConfig::default())?;
    let target = asset.context_dist();

    for shots in [0, 10_000] {
        let cfg = TrainConfig { shots, ..TrainConfig::default() };
        let report = train_distribution_loader(&target, 4, &cfg)?;
        let curve = &report.loss_curve;
        println!(
            "shots {shots:>6}: loss {:.4} -> {:.4}, fidelity {:.5}",
            curve[0],
            curve[curve.len() - 1],
            report.final_fidelity["target"]
        );
    }

    println!("\ntarget context distribution");
    for (bits, p) in target.to_map() {
        println!("  {bits}  {p:.4}");
    }
    Ok(())
}
