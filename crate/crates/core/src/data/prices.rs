use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    pub asset_id: String,
    pub timestamps: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(asset_id: impl Into<String>, timestamps: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::invalid("timestamps and prices differ in length"));
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::DataFormat {
                    row: i + 3,
                    message: format!("date {} does not follow {}", w[1], w[0]),
                });
            }
        }
        if let Some(i) = prices.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::DataFormat {
                row: i + 2,
                message: format!("price {} is not a positive number", prices[i]),
            });
        }
        Ok(PriceSeries {
            asset_id: asset_id.into(),
            timestamps,
            prices,
        })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

#[derive(Deserialize)]
struct Row {
    date: String,
    close: String,
}

/// Reads a `date,close` CSV with ISO-8601 dates. Row numbers in errors are
/// 1-based file lines (the header is line 1). The asset id is the file stem.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| Error::DataFormat {
        row: 1,
        message: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != ["date", "close"] {
        return Err(Error::DataFormat {
            row: 1,
            message: format!("expected header 'date,close' in {}", path.display()),
        });
    }
    let mut dates = Vec::new();
    let mut prices = Vec::new();
    for (i, rec) in reader.deserialize::<Row>().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::DataFormat {
            row,
            message: e.to_string(),
        })?;
        let date = NaiveDate::parse_from_str(&rec.date, "%Y-%m-%d").map_err(|e| Error::DataFormat {
            row,
            message: format!("bad date '{}': {e}", rec.date),
        })?;
        let close: f64 = rec.close.parse().map_err(|_| Error::DataFormat {
            row,
            message: format!("bad close '{}'", rec.close),
        })?;
        dates.push(date);
        prices.push(close);
    }
    let asset = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    PriceSeries::new(asset, dates, prices)
}

/// Order of the two preprocessing steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothOrder {
    #[default]
    DiffThenAverage,
    AverageThenDiff,
}

impl std::str::FromStr for SmoothOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff_then_average" => Ok(SmoothOrder::DiffThenAverage),
            "average_then_diff" => Ok(SmoothOrder::AverageThenDiff),
            _ => Err(Error::Config(format!(
                "unknown smoothing order '{s}' (diff_then_average|average_then_diff)"
            ))),
        }
    }
}

/// First differences followed by a trailing moving average of `window`
/// values advancing `stride` values at a time.
pub fn diff_and_smooth(series: &PriceSeries, window: usize, stride: usize) -> Result<Vec<f64>> {
    diff_and_smooth_ordered(&series.prices, window, stride, SmoothOrder::DiffThenAverage)
}

pub fn diff_and_smooth_ordered(
    prices: &[f64],
    window: usize,
    stride: usize,
    order: SmoothOrder,
) -> Result<Vec<f64>> {
    if window == 0 || stride == 0 {
        return Err(Error::invalid("window and stride must be positive"));
    }
    if prices.len() < window + 1 {
        return Err(Error::invalid(format!(
            "{} prices are too few for a window of {window}",
            prices.len()
        )));
    }
    let diffs = |x: &[f64]| -> Vec<f64> { x.windows(2).map(|w| w[1] - w[0]).collect() };
    let out = match order {
        SmoothOrder::DiffThenAverage => moving_average(&diffs(prices), window, stride),
        SmoothOrder::AverageThenDiff => diffs(&moving_average(prices, window, stride)),
    };
    if out.is_empty() {
        return Err(Error::invalid("series too short after preprocessing"));
    }
    Ok(out)
}

fn moving_average(x: &[f64], window: usize, stride: usize) -> Vec<f64> {
    if x.len() < window {
        return Vec::new();
    }
    (0..=x.len() - window)
        .step_by(stride)
        .map(|i| x[i..i + window].iter().sum::<f64>() / window as f64)
        .collect()
}

/// Writes a `date,close` CSV.
pub fn write_prices_csv(path: impl AsRef<Path>, series: &PriceSeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let io = |e: csv::Error| Error::io(path, e.into());
    w.write_record(["date", "close"]).map_err(io)?;
    for (d, p) in series.timestamps.iter().zip(&series.prices) {
        w.write_record([d.format("%Y-%m-%d").to_string(), format!("{p}")]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
