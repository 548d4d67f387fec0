//! Train one share-and-specify circuit on two correlated assets and compare
//! it with two separately trained single-asset circuits.

use cqnn::ansatz::ShareSpecifySpec;
use cqnn::data::{ingest_csv, AssetData, PipelineConfig};
use cqnn::training::{train_qmtl, train_qstl, TrainConfig};

fn main() -> cqnn::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let assets = ["pair_a", "pair_b"]
        .iter()
        .map(|n| AssetData::from_prices(&ingest_csv(format!("{dir}/{n}.csv"))?, &PipelineConfig::default()))
        .collect::<cqnn::Result<Vec<_>>>()?;
    let cfg = TrainConfig { block_epochs: 250, ..TrainConfig::default() };

    let spec = ShareSpecifySpec::new(3, 1, assets.len(), 1, 2);
    let mtl = train_qmtl(&assets, &spec, &cfg)?;
    println!("shared+specific: {} parameters per asset", spec.params_per_asset());
    for a in &assets {
        let stl = train_qstl(a, 4, &cfg)?;
        println!(
            "{}: KL mtl {:.4}  stl {:.4}  (basis input: {:.4} / {:.4})",
            a.asset_id,
            mtl.kl_per_asset[&a.asset_id],
            stl.kl_per_asset[&a.asset_id],
            mtl.kl_basis_per_asset[&a.asset_id],
            stl.kl_basis_per_asset[&a.asset_id],
        );
    }
    Ok(())
}
