use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::quantize::SymbolSeries;
use crate::error::{Error, Result};
use crate::simulator::state::{format_bits, parse_bits};

const SUM_TOL: f64 = 1e-10;
const MAX_WIDTH: usize = 26;

/// Probability table over all bitstrings of a fixed length.
///
/// Stored densely in basis-index order (leftmost bit most significant).
/// Serialized as `{"width": n, "probs": {"0101": p, ...}}` listing only
/// nonzero entries; absent keys mean probability zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistRepr", into = "DistRepr")]
pub struct EmpiricalDist {
    width: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    width: usize,
    probs: BTreeMap<String, f64>,
}

impl TryFrom<DistRepr> for EmpiricalDist {
    type Error = Error;

    fn try_from(r: DistRepr) -> Result<Self> {
        EmpiricalDist::from_map(r.width, &r.probs)
    }
}

impl From<EmpiricalDist> for DistRepr {
    fn from(d: EmpiricalDist) -> Self {
        DistRepr {
            width: d.width,
            probs: d.to_map(),
        }
    }
}

impl EmpiricalDist {
    pub fn from_dense(width: usize, probs: Vec<f64>) -> Result<Self> {
        check_width(width)?;
        if probs.len() != 1 << width {
            return Err(Error::invalid(format!(
                "expected {} probabilities for width {width}, got {}",
                1usize << width,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!("invalid probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { width, probs })
    }

    /// Normalizes nonnegative weights (e.g. squared amplitudes or counts).
    pub fn from_weights(width: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid("weights must have a positive finite sum"));
        }
        Self::from_dense(width, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn from_map(width: usize, map: &BTreeMap<String, f64>) -> Result<Self> {
        check_width(width)?;
        let mut probs = vec![0.0; 1 << width];
        for (bits, p) in map {
            if bits.len() != width {
                return Err(Error::invalid(format!(
                    "key '{bits}' does not have width {width}"
                )));
            }
            probs[parse_bits(bits)?] += p;
        }
        Self::from_dense(width, probs)
    }

    pub fn delta(width: usize, index: usize) -> Result<Self> {
        check_width(width)?;
        if index >= 1 << width {
            return Err(Error::invalid(format!("index {index} out of range")));
        }
        let mut probs = vec![0.0; 1 << width];
        probs[index] = 1.0;
        Ok(Self { width, probs })
    }

    pub fn uniform(width: usize) -> Result<Self> {
        check_width(width)?;
        let n = 1usize << width;
        Ok(Self {
            width,
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs.get(index).copied().unwrap_or(0.0)
    }

    pub fn prob_of(&self, bits: &str) -> Result<f64> {
        if bits.len() != self.width {
            return Err(Error::invalid(format!(
                "key '{bits}' does not have width {}",
                self.width
            )));
        }
        Ok(self.probs[parse_bits(bits)?])
    }

    /// Nonzero entries keyed by bitstring.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (format_bits(i, self.width), *p))
            .collect()
    }

    /// Marginal over the bit positions in `keep` (position 0 = leftmost bit).
    /// The output bit order follows `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<EmpiricalDist> {
        check_positions(keep, self.width)?;
        let mut out = vec![0.0; 1 << keep.len()];
        for (i, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            out[gather_bits(i, self.width, keep)] += p;
        }
        Ok(Self {
            width: keep.len(),
            probs: out,
        })
    }

    pub fn total_variation(&self, other: &EmpiricalDist) -> Result<f64> {
        self.check_same_width(other)?;
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    pub(crate) fn check_same_width(&self, other: &EmpiricalDist) -> Result<()> {
        if self.width != other.width {
            return Err(Error::invalid(format!(
                "distribution widths differ: {} vs {}",
                self.width, other.width
            )));
        }
        Ok(())
    }
}

/// Extracts the bits of `index` at `positions` into a packed integer,
/// first position most significant.
pub(crate) fn gather_bits(index: usize, width: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | (index >> (width - 1 - p) & 1))
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::invalid(format!(
            "distribution width {width} outside 1..={MAX_WIDTH}"
        )));
    }
    Ok(())
}

pub(crate) fn check_positions(keep: &[usize], width: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::invalid("empty qubit/bit subset"));
    }
    for (i, &q) in keep.iter().enumerate() {
        if q >= width {
            return Err(Error::invalid(format!("index {q} out of range for width {width}")));
        }
        if keep[..i].contains(&q) {
            return Err(Error::invalid(format!("index {q} repeated")));
        }
    }
    Ok(())
}

/// Outcome counts keyed by bitstring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub width: usize,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn new(width: usize) -> Self {
        Counts {
            width,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, index: usize, n: u64) {
        if n > 0 {
            *self.counts.entry(format_bits(index, self.width)).or_default() += n;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// Dense per-index counts.
    pub fn dense(&self) -> Vec<u64> {
        let mut out = vec![0; 1 << self.width];
        for (bits, n) in &self.counts {
            out[parse_bits(bits).expect("count keys are bitstrings")] += n;
        }
        out
    }

    pub fn to_dist(&self) -> Result<EmpiricalDist> {
        EmpiricalDist::from_weights(
            self.width,
            self.dense().into_iter().map(|n| n as f64).collect(),
        )
    }
}

/// Histogram of all stride-1 windows of `window_len` symbols. Each symbol
/// contributes `log2(d)` bits, most significant first, in time order.
pub fn empirical_dist(symbols: &SymbolSeries, window_len: usize) -> Result<EmpiricalDist> {
    if window_len == 0 {
        return Err(Error::invalid("window length must be positive"));
    }
    let s = symbols.symbols();
    if s.len() < window_len {
        return Err(Error::invalid(format!(
            "{} symbols are not enough for windows of {window_len}",
            s.len()
        )));
    }
    let bits = symbols.bits_per_symbol();
    let width = bits * window_len;
    check_width(width)?;
    let mut counts = vec![0.0; 1 << width];
    for w in s.windows(window_len) {
        let idx = w.iter().fold(0usize, |acc, &sym| (acc << bits) | sym as usize);
        counts[idx] += 1.0;
    }
    EmpiricalDist::from_weights(width, counts)
}

/// `P(next | context)` from a joint table whose leading bits are the context.
/// An unseen context yields the uniform distribution.
pub fn conditional_slice(joint: &EmpiricalDist, context: &str) -> Result<EmpiricalDist> {
    let cw = context.len();
    if cw == 0 || cw >= joint.width() {
        return Err(Error::invalid(format!(
            "context '{context}' must be shorter than the joint width {}",
            joint.width()
        )));
    }
    let ctx = parse_bits(context)?;
    let rest = joint.width() - cw;
    let block = &joint.probs()[ctx << rest..(ctx + 1) << rest];
    let mass: f64 = block.iter().sum();
    if mass <= 0.0 {
        return EmpiricalDist::uniform(rest);
    }
    EmpiricalDist::from_weights(rest, block.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::quantize::SymbolSeries;

    fn series(sym: &[u8], d: usize) -> SymbolSeries {
        SymbolSeries::from_symbols(sym.to_vec(), d).unwrap()
    }

    #[test]
    fn empirical_dist_examples() {
        let d = empirical_dist(&series(&[0, 1, 0, 1], 2), 2).unwrap();
        assert!((d.prob_of("01").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.prob_of("10").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.to_map().len(), 2);

        let c = empirical_dist(&series(&[1; 9], 2), 3).unwrap();
        assert_eq!(c.to_map(), BTreeMap::from([("111".to_string(), 1.0)]));

        assert!(empirical_dist(&series(&[0, 1], 2), 3).is_err());
    }

    #[test]
    fn four_level_symbols_pack_two_bits() {
        let d = empirical_dist(&series(&[3, 1, 2], 4), 2).unwrap();
        assert_eq!(d.width(), 4);
        assert_eq!(d.prob_of("1101").unwrap(), 0.5);
        assert_eq!(d.prob_of("0110").unwrap(), 0.5);
    }

    #[test]
    fn conditional_examples() {
        let joint = EmpiricalDist::from_map(
            2,
            &BTreeMap::from([("00".into(), 0.25), ("01".into(), 0.75)]),
        )
        .unwrap();
        let c = conditional_slice(&joint, "0").unwrap();
        assert_eq!(c.probs(), &[0.25, 0.75]);
        let unseen = conditional_slice(&joint, "1").unwrap();
        assert_eq!(unseen.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginal_reorders_bits() {
        let d = EmpiricalDist::delta(3, 0b011).unwrap();
        assert_eq!(d.marginal(&[0, 2]).unwrap().prob_of("01").unwrap(), 1.0);
        assert_eq!(d.marginal(&[2, 0]).unwrap().prob_of("10").unwrap(), 1.0);
        assert!(d.marginal(&[]).is_err());
        assert!(d.marginal(&[3]).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(EmpiricalDist::from_dense(1, vec![0.5, 0.4]).is_err());
        assert!(EmpiricalDist::from_dense(1, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = EmpiricalDist::from_dense(2, vec![0.1, 0.0, 0.2, 0.7]).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert!(v["probs"].get("01").is_none());
        let back: EmpiricalDist = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
