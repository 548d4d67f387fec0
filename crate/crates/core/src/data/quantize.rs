use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantMode {
    /// Two levels split at zero; a zero return counts as up.
    Sign,
    /// `d` equal-width levels over the observed range.
    Uniform,
    /// Levels holding roughly equal numbers of observations.
    Quantile,
}

impl std::str::FromStr for QuantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sign" => Ok(QuantMode::Sign),
            "uniform" => Ok(QuantMode::Uniform),
            "quantile" => Ok(QuantMode::Quantile),
            _ => Err(Error::Config(format!(
                "unknown quantization mode '{s}' (sign|uniform|quantile)"
            ))),
        }
    }
}

/// Fitted return-to-level mapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub d: usize,
    pub mode: QuantMode,
    /// `d - 1` increasing thresholds; level `i` is `[boundaries[i-1], boundaries[i])`.
    pub boundaries: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    /// Mean fitted return inside each level (midpoint when a level is empty).
    pub class_means: Vec<f64>,
}

impl QuantizerSpec {
    pub fn bits_per_symbol(&self) -> usize {
        self.d.trailing_zeros() as usize
    }

    /// Width of a uniform level.
    pub fn delta_x(&self) -> f64 {
        (self.x_max - self.x_min) / (self.d - 1) as f64
    }

    pub fn level(&self, x: f64) -> u8 {
        let i = match self.mode {
            QuantMode::Uniform => {
                let i = ((x - self.x_min) / self.delta_x()).floor();
                i.clamp(0.0, (self.d - 1) as f64) as usize
            }
            _ => self.boundaries.partition_point(|b| *b <= x),
        };
        i as u8
    }

    /// Return value standing for each level: `x_min + i*dx` for uniform
    /// levels, bin midpoints for quantile levels (the fitted range closes the
    /// end bins), and the class means for sign levels.
    pub fn representatives(&self) -> Vec<f64> {
        match self.mode {
            QuantMode::Uniform => (0..self.d)
                .map(|i| self.x_min + i as f64 * self.delta_x())
                .collect(),
            QuantMode::Quantile => {
                let mut edges = vec![self.x_min];
                edges.extend(&self.boundaries);
                edges.push(self.x_max);
                edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
            }
            QuantMode::Sign => self.class_means.clone(),
        }
    }
}

/// Symbols in `0..d`, with `d` a power of two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSeries {
    symbols: Vec<u8>,
    d: usize,
}

impl SymbolSeries {
    pub fn from_symbols(symbols: Vec<u8>, d: usize) -> Result<Self> {
        check_levels(d)?;
        if let Some(s) = symbols.iter().find(|s| **s as usize >= d) {
            return Err(Error::invalid(format!("symbol {s} out of range for d={d}")));
        }
        Ok(SymbolSeries { symbols, d })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.d.trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

fn check_levels(d: usize) -> Result<()> {
    if d < 2 || !d.is_power_of_two() || d > 256 {
        return Err(Error::invalid(format!(
            "level count {d} must be a power of two in 2..=256"
        )));
    }
    Ok(())
}

pub fn fit_quantizer(returns: &[f64], d: usize, mode: QuantMode) -> Result<QuantizerSpec> {
    check_levels(d)?;
    if returns.is_empty() {
        return Err(Error::invalid("cannot fit a quantizer to an empty series"));
    }
    if returns.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateData("non-finite return".into()));
    }
    let x_min = returns.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = returns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let boundaries = match mode {
        QuantMode::Sign => {
            if d != 2 {
                return Err(Error::invalid("sign quantization has exactly two levels"));
            }
            vec![0.0]
        }
        QuantMode::Uniform => {
            if x_max == x_min {
                return Err(Error::DegenerateData(format!(
                    "constant returns ({x_min}) cannot be quantized uniformly"
                )));
            }
            let dx = (x_max - x_min) / (d - 1) as f64;
            (1..d).map(|j| x_min + j as f64 * dx).collect()
        }
        QuantMode::Quantile => {
            let mut sorted = returns.to_vec();
            sorted.sort_by(f64::total_cmp);
            let b: Vec<f64> = (1..d).map(|j| quantile_sorted(&sorted, j as f64 / d as f64)).collect();
            if b.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::DegenerateData(
                    "too many repeated returns for distinct quantile levels".into(),
                ));
            }
            b
        }
    };
    let mut spec = QuantizerSpec {
        d,
        mode,
        boundaries,
        x_min,
        x_max,
        class_means: Vec::new(),
    };
    let mut sums = vec![0.0; d];
    let mut counts = vec![0usize; d];
    for &x in returns {
        let i = spec.level(x) as usize;
        sums[i] += x;
        counts[i] += 1;
    }
    let mut edges = vec![x_min];
    edges.extend(&spec.boundaries);
    edges.push(x_max);
    spec.class_means = (0..d)
        .map(|i| {
            if counts[i] > 0 {
                sums[i] / counts[i] as f64
            } else {
                0.5 * (edges[i] + edges[i + 1])
            }
        })
        .collect();
    Ok(spec)
}

/// Linear-interpolation sample quantile (the common "type 7" definition).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantize(returns: &[f64], spec: &QuantizerSpec) -> SymbolSeries {
    SymbolSeries {
        symbols: returns.iter().map(|&x| spec.level(x)).collect(),
        d: spec.d,
    }
}

/// Chronological split at `floor(fraction * len)`.
pub fn split_train_test(symbols: &SymbolSeries, fraction: f64) -> Result<(SymbolSeries, SymbolSeries)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("split fraction {fraction} outside (0, 1)")));
    }
    let at = (fraction * symbols.len() as f64).floor() as usize;
    let (a, b) = symbols.symbols.split_at(at);
    Ok((
        SymbolSeries {
            symbols: a.to_vec(),
            d: symbols.d,
        },
        SymbolSeries {
            symbols: b.to_vec(),
            d: symbols.d,
        },
    ))
}
