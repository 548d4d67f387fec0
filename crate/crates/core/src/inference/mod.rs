//! Conditional prediction, rollout, and KL evaluation of trained circuits.

mod rollout;

pub use rollout::{portfolio_rollout, sequential_rollout, PortfolioRollout, RolloutMode, DEFAULT_QUBIT_BUDGET};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::data::dist::{conditional_slice, EmpiricalDist};
use crate::data::quantize::QuantizerSpec;
use crate::error::{Error, Result};
use crate::simulator::layout::QubitLayout;
use crate::simulator::measure::marginal_probs;
use crate::simulator::state::{format_bits, parse_bits, Statevector};

/// Smoothing added to both arguments of [`kl_divergence`] in reports.
pub const KL_EPS: f64 = 1e-9;

/// Below this context-readback probability a prediction is degenerate.
pub const MIN_PRESERVATION: f64 = 1e-12;

/// `sum_x p(x) ln(p(x)/q(x))` after adding `eps` to every entry of both
/// distributions and renormalizing.
pub fn kl_divergence(p: &EmpiricalDist, q: &EmpiricalDist, eps: f64) -> Result<f64> {
    p.check_same_width(q)?;
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("smoothing must be positive, got {eps}")));
    }
    let zp = 1.0 + eps * p.probs().len() as f64;
    let zq = 1.0 + eps * q.probs().len() as f64;
    let kl: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| {
            let a = (a + eps) / zp;
            let b = (b + eps) / zq;
            a * (a / b).ln()
        })
        .sum();
    Ok(kl.max(0.0))
}

/// KL of each context's conditional, `(context, P(context), KL)`, for the
/// contexts observed in `truth`. `model` contexts with no mass predict uniform.
pub fn per_context_kl(truth: &EmpiricalDist, model: &EmpiricalDist, context_bits: usize) -> Result<Vec<(String, f64, f64)>> {
    truth.check_same_width(model)?;
    let keep: Vec<usize> = (0..context_bits).collect();
    let ctx = truth.marginal(&keep)?;
    let mut out = Vec::new();
    for (x, &w) in ctx.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let bits = format_bits(x, context_bits);
        let p = conditional_slice(truth, &bits)?;
        let q = conditional_slice(model, &bits)?;
        out.push((bits, w, kl_divergence(&p, &q, KL_EPS)?));
    }
    Ok(out)
}

/// `sum_x P(x) KL(P(.|x) || Q(.|x))`.
pub fn weighted_conditional_kl(truth: &EmpiricalDist, model: &EmpiricalDist, context_bits: usize) -> Result<f64> {
    Ok(per_context_kl(truth, model, context_bits)?
        .iter()
        .map(|(_, w, kl)| w * kl)
        .sum())
}

/// Amplitude index of `|context>|0...0>|label>|0>` in the model register.
pub fn basis_index(layout: &QubitLayout, context: usize, label: Option<usize>) -> Result<usize> {
    let n = layout.model_width();
    let cb = layout.context.len();
    if context >= 1 << cb {
        return Err(Error::invalid(format!("context {context} does not fit {cb} bits")));
    }
    let mut idx = context << (n - cb);
    match (label, layout.label_work()) {
        (Some(k), Some(work)) => {
            let m = layout.label_index().len();
            if k >= 1 << m {
                return Err(Error::invalid(format!("label {k} out of range for {m} label bits")));
            }
            idx |= k << (n - work);
        }
        (None, None) => {}
        (Some(_), None) => return Err(Error::invalid("model has no label register")),
        (None, Some(_)) => return Err(Error::invalid("model needs an asset label")),
    }
    Ok(idx)
}

/// `sum_x sqrt(P(x)) |x>|0...0>|label>|0>`.
pub fn batch_input(layout: &QubitLayout, context_dist: &EmpiricalDist, label: Option<usize>) -> Result<Statevector> {
    if context_dist.width() != layout.context.len() {
        return Err(Error::invalid(format!(
            "context distribution has {} bits, model expects {}",
            context_dist.width(),
            layout.context.len()
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.model_width()];
    for (x, p) in context_dist.probs().iter().enumerate() {
        amps[basis_index(layout, x, label)?] = Complex64::new(p.sqrt(), 0.0);
    }
    Statevector::from_amplitudes(amps)
}

/// Output distribution over the data qubits (context then prediction).
pub fn output_joint(circuit: &ParamCircuit, params: &[f64], layout: &QubitLayout, input: &Statevector) -> Result<EmpiricalDist> {
    let mut out = input.clone();
    circuit.apply(&mut out, params)?;
    let keep: Vec<usize> = layout.data().collect();
    marginal_probs(&out, &keep)
}

/// Unnormalized prediction weights `P(context reads x, prediction = y)` for
/// basis input `|x>|0>|label>`, and their sum.
pub(crate) fn readback_weights(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    context: usize,
    label: Option<usize>,
) -> Result<(Vec<f64>, f64)> {
    let mut s = Statevector::basis(layout.model_width(), basis_index(layout, context, label)?)?;
    circuit.apply(&mut s, params)?;
    let data: Vec<usize> = layout.data().collect();
    let joint = marginal_probs(&s, &data)?;
    let pb = layout.prediction.len();
    let w = joint.probs()[context << pb..(context + 1) << pb].to_vec();
    let mass = w.iter().sum();
    Ok((w, mass))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub context: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    pub next_dist: EmpiricalDist,
    pub expected_movement: Option<f64>,
    pub preservation_score: f64,
}

/// Loads `|context>` (and the asset label), runs the circuit, and returns the
/// prediction-register distribution conditioned on the context qubits
/// reading back `context`.
pub fn predict_conditional(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    context: &str,
    label: Option<usize>,
    quantizer: Option<&QuantizerSpec>,
) -> Result<Prediction> {
    if context.len() != layout.context.len() {
        return Err(Error::invalid(format!(
            "context '{context}' has {} bits, model expects {}",
            context.len(),
            layout.context.len()
        )));
    }
    let (w, mass) = readback_weights(circuit, params, layout, parse_bits(context)?, label)?;
    if mass < MIN_PRESERVATION {
        return Err(Error::DegeneratePrediction {
            context: context.to_string(),
            preservation: mass,
        });
    }
    let next_dist = EmpiricalDist::from_weights(layout.prediction.len(), w)?;
    let expected_movement = match quantizer {
        Some(q) if q.bits_per_symbol() == layout.prediction.len() => Some(expected_movement(&next_dist, q)?),
        _ => None,
    };
    Ok(Prediction {
        context: context.to_string(),
        label,
        next_dist,
        expected_movement,
        preservation_score: mass,
    })
}

/// `sum_i P(i) * v_i` with `v_i` the quantizer's representative return of level `i`.
pub fn expected_movement(dist: &EmpiricalDist, quantizer: &QuantizerSpec) -> Result<f64> {
    if 1usize << dist.width() != quantizer.d {
        return Err(Error::invalid(format!(
            "a {}-bit distribution does not match d={}",
            dist.width(),
            quantizer.d
        )));
    }
    Ok(dist
        .probs()
        .iter()
        .zip(quantizer.representatives())
        .map(|(p, v)| p * v)
        .sum())
}

/// `sum_x P(x) * Prob(context qubits read x | input |x>|0>)`.
pub fn context_preservation_score(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    context_dist: &EmpiricalDist,
    label: Option<usize>,
) -> Result<f64> {
    let mut score = 0.0;
    for (x, &p) in context_dist.probs().iter().enumerate() {
        if p > 0.0 {
            score += p * readback_weights(circuit, params, layout, x, label)?.1;
        }
    }
    Ok(score.clamp(0.0, 1.0))
}

/// Conditionals predicted from basis inputs, assembled into a joint with the
/// given context marginal. Degenerate contexts predict uniform.
pub fn basis_model_joint(
    circuit: &ParamCircuit,
    params: &[f64],
    layout: &QubitLayout,
    context_dist: &EmpiricalDist,
    label: Option<usize>,
) -> Result<EmpiricalDist> {
    let pb = layout.prediction.len();
    let mut probs = vec![0.0; (context_dist.probs().len()) << pb];
    for (x, &p) in context_dist.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let (w, mass) = readback_weights(circuit, params, layout, x, label)?;
        for (y, wy) in w.iter().enumerate() {
            probs[x << pb | y] = if mass < MIN_PRESERVATION {
                p / (1 << pb) as f64
            } else {
                p * wy / mass
            };
        }
    }
    EmpiricalDist::from_weights(layout.data().len(), probs)
}
