//! From closing prices to symbol windows: smoothing, quantile and sign
//! quantization, and the resulting joint distributions.

use cqnn::data::{diff_and_smooth, empirical_dist, fit_quantizer, ingest_csv, quantize, QuantMode};

fn main() -> cqnn::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_prices.csv");
    let series = ingest_csv(path)?;
    let returns = diff_and_smooth(&series, 5, 1)?;
    println!("{} prices -> {} smoothed returns", series.len(), returns.len());

    for (d, mode) in [(2, QuantMode::Sign), (4, QuantMode::Quantile), (4, QuantMode::Uniform)] {
        let q = fit_quantizer(&returns, d, mode)?;
        let symbols = quantize(&returns, &q);
        let mut freq = vec![0usize; d];
        symbols.symbols().iter().for_each(|&s| freq[s as usize] += 1);
        let joint = empirical_dist(&symbols, 2)?;
        let top = joint
            .to_map()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or_default();
        println!("d={d} {mode:?}: level counts {freq:?}, representatives {:.4?}", q.representatives());
        println!("    most common 2-symbol window {} ({:.3})", top.0, top.1);
    }
    Ok(())
}
