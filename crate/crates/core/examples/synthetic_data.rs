//! Regenerates the bundled price files under `data/`.
//!
//! ```text
//! cargo run --example synthetic_data -- [out_dir]
//! ```

use std::path::PathBuf;

use cqnn::data::prices::write_prices_csv;
use cqnn::data::synthetic::{factor_returns, momentum_walk, prices_from_increments, FactorModel};

fn main() -> cqnn::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir).expect("output directory");

    // Daily closes with mild momentum, about 40 years of trading days.
    let sample = momentum_walk("sample_prices", 10_033, 0.05, 0.02, 7)?;
    write_prices_csv(dir.join("sample_prices.csv"), &sample)?;

    // Two assets driven by one persistent factor plus their own noise.
    let pair = factor_returns(&FactorModel::default(), 2, 2000, 100);
    for (name, inc) in ["pair_a", "pair_b"].iter().zip(&pair) {
        let s = prices_from_increments(name, inc, 100.0)?;
        write_prices_csv(dir.join(format!("{name}.csv")), &s)?;
    }

    // Three falls then three rises, repeated. With window 1 and T = 3 every
    // context has exactly one continuation.
    let steps: Vec<f64> = (0..600).map(|i| if i % 6 < 3 { -1.0 } else { 1.0 }).collect();
    let rule = prices_from_increments("rule_prices", &steps, 50.0)?;
    write_prices_csv(dir.join("rule_prices.csv"), &rule)?;

    for f in ["sample_prices", "pair_a", "pair_b", "rule_prices"] {
        println!("{}", dir.join(format!("{f}.csv")).display());
    }
    Ok(())
}
