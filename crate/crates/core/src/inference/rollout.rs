use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{readback_weights, MIN_PRESERVATION};
use crate::circuit::ParamCircuit;
use crate::data::dist::EmpiricalDist;
use crate::error::{Error, Result};
use crate::rng::derived_rng;
use crate::simulator::layout::QubitLayout;
use crate::simulator::measure::sample_index;
use crate::simulator::state::{format_bits, parse_bits};

pub const DEFAULT_QUBIT_BUDGET: usize = 20;

const EPISODE_CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RolloutMode {
    /// Probability of every path, enumerated exactly. The budget caps the
    /// equivalent register: context, `R` prediction blocks and label.
    Exact { qubit_budget: usize },
    /// Measure the prediction each step, feed it back, pool `episodes` runs.
    Sampled { episodes: u64, seed: u64 },
}

/// Conditionals of one model for one label, cached per window.
struct Stepper<'a> {
    circuit: &'a ParamCircuit,
    params: &'a [f64],
    layout: &'a QubitLayout,
    label: Option<usize>,
    cache: HashMap<usize, Vec<f64>>,
}

impl Stepper<'_> {
    fn conditional(&mut self, window: usize) -> Result<&[f64]> {
        if !self.cache.contains_key(&window) {
            let (w, mass) = readback_weights(self.circuit, self.params, self.layout, window, self.label)?;
            if mass < MIN_PRESERVATION {
                return Err(Error::DegeneratePrediction {
                    context: format_bits(window, self.layout.context.len()),
                    preservation: mass,
                });
            }
            self.cache.insert(window, w.iter().map(|x| x / mass).collect());
        }
        Ok(&self.cache[&window])
    }

    /// Every window reachable from `start` within `steps` steps, so sampled
    /// episodes can share a read-only table.
    fn fill(&mut self, start: usize, steps: usize) -> Result<()> {
        let cb = self.layout.context.len();
        let pb = self.layout.prediction.len();
        let mask = (1usize << cb) - 1;
        let mut frontier = vec![start];
        for _ in 0..steps {
            let mut next = Vec::new();
            for w in frontier {
                let cond = self.conditional(w)?.to_vec();
                for (y, p) in cond.iter().enumerate() {
                    let nw = ((w << pb) | y) & mask;
                    if *p > 0.0 && !self.cache.contains_key(&nw) && !next.contains(&nw) {
                        next.push(nw);
                    }
                }
            }
            frontier = next;
        }
        for w in frontier {
            self.conditional(w)?;
        }
        Ok(())
    }
}

/// Distribution over the `R` predicted blocks (`R * prediction_bits` bits)
/// obtained by applying the circuit `R` times, each time on the last
/// `context_bits` of context-plus-predictions. Each step's prediction is the
/// readback-conditioned distribution of [`super::predict_conditional`].
pub fn sequential_rollout(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    context: &str,
    label: Option<usize>,
    steps: usize,
    mode: RolloutMode,
) -> Result<EmpiricalDist> {
    let cb = layout.context.len();
    let pb = layout.prediction.len();
    if steps == 0 {
        return Err(Error::invalid("rollout needs at least one step"));
    }
    if context.len() != cb {
        return Err(Error::invalid(format!(
            "context '{context}' has {} bits, model expects {cb}",
            context.len()
        )));
    }
    let out_bits = steps * pb;
    let start = parse_bits(context)?;
    let mut stepper = Stepper {
        circuit,
        params,
        layout,
        label,
        cache: HashMap::new(),
    };
    let mask = (1usize << cb) - 1;
    match mode {
        RolloutMode::Exact { qubit_budget } => {
            let need = cb + out_bits + layout.label.len();
            if need > qubit_budget {
                return Err(Error::Resource(format!(
                    "exact rollout needs {need} qubits, budget is {qubit_budget}; use sampled mode"
                )));
            }
            // paths[i] = probability of path i (R blocks, first block most significant)
            let mut paths = vec![1.0];
            let mut windows = vec![start];
            for _ in 0..steps {
                let mut next_p = Vec::with_capacity(paths.len() << pb);
                let mut next_w = Vec::with_capacity(paths.len() << pb);
                for (p, w) in paths.iter().zip(&windows) {
                    let cond = stepper.conditional(*w)?;
                    for (y, q) in cond.iter().enumerate() {
                        next_p.push(p * q);
                        next_w.push(((w << pb) | y) & mask);
                    }
                }
                paths = next_p;
                windows = next_w;
            }
            EmpiricalDist::from_weights(out_bits, paths)
        }
        RolloutMode::Sampled { episodes, seed } => {
            if episodes == 0 {
                return Err(Error::invalid("sampled rollout needs at least one episode"));
            }
            if out_bits > 26 {
                return Err(Error::Resource(format!("{out_bits} path bits exceed the table limit")));
            }
            stepper.fill(start, steps - 1)?;
            let table = &stepper.cache;
            let chunks = episodes.div_ceil(EPISODE_CHUNK);
            let counts: Vec<Vec<f64>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = derived_rng(seed, c);
                    let n = EPISODE_CHUNK.min(episodes - c * EPISODE_CHUNK);
                    let mut counts = vec![0.0; 1 << out_bits];
                    for _ in 0..n {
                        let (mut w, mut path) = (start, 0usize);
                        for _ in 0..steps {
                            let y = sample_index(&table[&w], &mut rng);
                            path = (path << pb) | y;
                            w = ((w << pb) | y) & mask;
                        }
                        counts[path] += 1.0;
                    }
                    counts
                })
                .collect();
            let mut total = vec![0.0; 1 << out_bits];
            for c in counts {
                total.iter_mut().zip(c).for_each(|(t, x)| *t += x);
            }
            EmpiricalDist::from_weights(out_bits, total)
        }
    }
}

/// Rollouts for every asset of a portfolio held in label superposition
/// `sum_k sqrt(w_k / W) |k>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortfolioRollout {
    /// Normalized weights: the label marginal.
    pub weights: Vec<f64>,
    /// Per-label path distribution (absent when the weight is zero).
    pub paths: Vec<Option<EmpiricalDist>>,
    /// Joint over label index bits followed by path bits.
    pub joint: EmpiricalDist,
}

pub fn portfolio_rollout(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    contexts: &[String],
    weights: &[f64],
    steps: usize,
    mode: RolloutMode,
) -> Result<PortfolioRollout> {
    let m = layout.label_index().len();
    let k_total = 1usize << m;
    if layout.label.is_empty() || contexts.len() != k_total || weights.len() != k_total {
        return Err(Error::invalid(format!(
            "portfolio needs {k_total} contexts and weights for this model, got {} and {}",
            contexts.len(),
            weights.len()
        )));
    }
    // Label amplitudes are exactly those of the label preparation.
    let label_state = crate::ansatz::prepare_label(weights)?;
    let norm: Vec<f64> = (0..k_total).map(|k| label_state.amps()[k << 1].norm_sqr()).collect();
    let out_bits = steps * layout.prediction.len();
    let mut joint = vec![0.0; k_total << out_bits];
    let mut paths = Vec::with_capacity(k_total);
    for k in 0..k_total {
        if norm[k] == 0.0 {
            paths.push(None);
            continue;
        }
        let mode_k = match mode {
            RolloutMode::Sampled { episodes, seed } => RolloutMode::Sampled {
                episodes,
                seed: seed.wrapping_add(k as u64),
            },
            exact => exact,
        };
        let d = sequential_rollout(circuit, params, layout, &contexts[k], Some(k), steps, mode_k)?;
        for (i, p) in d.probs().iter().enumerate() {
            joint[k << out_bits | i] = norm[k] * p;
        }
        paths.push(Some(d));
    }
    Ok(PortfolioRollout {
        weights: norm,
        paths,
        joint: EmpiricalDist::from_weights(m + out_bits, joint)?,
    })
}
