//! Reproducible synthetic datasets.

use chrono::{Days, NaiveDate};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dist::EmpiricalDist;
use super::prices::PriceSeries;
use crate::error::Result;
use crate::rng::derived_rng;

/// Joint over `t + 1` bits: contexts uniform, next bit a function of the context.
pub fn rule_joint(t: usize, rule: impl Fn(usize) -> usize) -> Result<EmpiricalDist> {
    let n_ctx = 1usize << t;
    let mut probs = vec![0.0; n_ctx << 1];
    for c in 0..n_ctx {
        probs[c << 1 | (rule(c) & 1)] = 1.0 / n_ctx as f64;
    }
    EmpiricalDist::from_dense(t + 1, probs)
}

/// The "next symbol repeats the last one" rule.
pub fn copy_last_joint(t: usize) -> Result<EmpiricalDist> {
    rule_joint(t, |c| c & 1)
}

/// Parameters of the latent-factor return model
/// `r_{k,t} = loading * f_t + noise * e_{k,t}` with an AR(1) factor
/// `f_t = persistence * f_{t-1} + u_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorModel {
    pub persistence: f64,
    pub loading: f64,
    pub noise: f64,
    pub drift: f64,
}

impl Default for FactorModel {
    fn default() -> Self {
        FactorModel {
            persistence: 0.6,
            loading: 1.0,
            noise: 0.6,
            drift: 0.02,
        }
    }
}

/// `k` return series of length `n` sharing one latent factor.
pub fn factor_returns(model: &FactorModel, k: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut frng = derived_rng(seed, 0);
    let mut f = 0.0;
    let factor: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = StandardNormal.sample(&mut frng);
            f = model.persistence * f + u;
            f
        })
        .collect();
    (0..k)
        .map(|a| {
            let mut rng = derived_rng(seed, 1 + a as u64);
            factor
                .iter()
                .map(|&f| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    model.drift + model.loading * f + model.noise * e
                })
                .collect()
        })
        .collect()
}

/// Price path from returns (as price increments), starting at `start`, one
/// row per calendar day from 1990-01-01. Prices are kept positive by
/// construction: the path is shifted up if it would dip below 1.
pub fn prices_from_increments(asset_id: &str, increments: &[f64], start: f64) -> Result<PriceSeries> {
    let mut p = start;
    let mut path = Vec::with_capacity(increments.len() + 1);
    path.push(p);
    for r in increments {
        p += r;
        path.push(p);
    }
    let low = path.iter().copied().fold(f64::INFINITY, f64::min);
    if low < 1.0 {
        let lift = 1.0 - low;
        path.iter_mut().for_each(|x| *x += lift);
    }
    let day0 = NaiveDate::from_ymd_opt(1990, 1, 1).expect("valid date");
    let dates = (0..path.len() as u64)
        .map(|i| day0.checked_add_days(Days::new(i)).expect("date in range"))
        .collect();
    PriceSeries::new(asset_id, dates, path)
}

/// Geometric random walk with momentum in the daily log-returns.
pub fn momentum_walk(asset_id: &str, n_prices: usize, momentum: f64, vol: f64, seed: u64) -> Result<PriceSeries> {
    let mut rng = derived_rng(seed, 0);
    let mut prev = 0.0;
    let mut price: f64 = 20.0;
    let mut incs = Vec::with_capacity(n_prices.saturating_sub(1));
    for _ in 1..n_prices {
        let z: f64 = StandardNormal.sample(&mut rng);
        let r = momentum * prev + vol * z + 0.0003 * rng.random::<f64>();
        prev = r;
        let next = price * r.exp();
        incs.push(next - price);
        price = next;
    }
    prices_from_increments(asset_id, &incs, 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_last_rule_is_deterministic_per_context() {
        let j = copy_last_joint(3).unwrap();
        assert_eq!(j.to_map().len(), 8);
        assert_eq!(j.prob_of("0011").unwrap(), 0.125);
        assert_eq!(j.prob_of("0010").unwrap(), 0.0);
    }

    #[test]
    fn factor_assets_are_correlated() {
        let r = factor_returns(&FactorModel::default(), 2, 5000, 1);
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let (ma, mb) = (mean(&r[0]), mean(&r[1]));
        let cov: f64 = r[0].iter().zip(&r[1]).map(|(a, b)| (a - ma) * (b - mb)).sum();
        let va: f64 = r[0].iter().map(|a| (a - ma).powi(2)).sum();
        let vb: f64 = r[1].iter().map(|b| (b - mb).powi(2)).sum();
        assert!(cov / (va * vb).sqrt() > 0.5);
    }

    #[test]
    fn walk_is_positive_and_dated() {
        let s = momentum_walk("x", 500, 0.2, 0.02, 3).unwrap();
        assert_eq!(s.len(), 500);
        assert!(s.prices.iter().all(|p| *p > 0.0));
    }
}
