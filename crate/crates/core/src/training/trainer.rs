use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{GradEstimator, InitScheme, TrainConfig};
use super::grad::{grad_parameter_shift, grad_spsa};
use super::loss::{dist_to_amplitudes, Example, Objective};
use super::model::ModelArch;
use crate::ansatz::ShareSpecifySpec;
use crate::circuit::{BlockTag, ParamCircuit};
use crate::data::dist::EmpiricalDist;
use crate::data::AssetData;
use crate::error::{Error, Result};
use crate::inference::{
    basis_model_joint, batch_input, context_preservation_score, kl_divergence, output_joint, weighted_conditional_kl, KL_EPS,
};
use crate::rng::{derived_rng, SimRng};
use crate::simulator::layout::QubitLayout;
use crate::simulator::state::{fidelity, Statevector};

/// Result of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Loss at the start of every epoch (before that epoch's update).
    pub loss_curve: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Probability-weighted KL between empirical conditionals and the
    /// conditionals of the trained circuit's batch output, per asset.
    pub kl_per_asset: BTreeMap<String, f64>,
    /// Same KL with each context loaded as a basis state and the prediction
    /// conditioned on context readback.
    pub kl_basis_per_asset: BTreeMap<String, f64>,
    /// Exact fidelity of the batch output to the loaded target, per asset.
    pub final_fidelity: BTreeMap<String, f64>,
    pub preservation_per_asset: BTreeMap<String, f64>,
    pub epochs_run: usize,
    pub arch: ModelArch,
    pub circuit_hash: String,
    pub config: TrainConfig,
}

impl TrainReport {
    /// Export form: loss curve, KL, parameters, config and diagnostics.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// One asset's training data placed on the model register.
struct Task {
    name: String,
    example: Example,
    active: Vec<usize>,
    context_bits: usize,
}

pub fn initial_params(n: usize, cfg: &TrainConfig) -> Vec<f64> {
    match cfg.init {
        InitScheme::Zeros => vec![0.0; n],
        InitScheme::Uniform => {
            let mut rng = derived_rng(cfg.seed, 0);
            (0..n).map(|_| rng.random_range(-PI..PI)).collect()
        }
    }
}

fn step(obj: &Objective, params: &mut [f64], active: &[usize], cfg: &TrainConfig, rng: &mut SimRng) -> Result<f64> {
    let loss = obj.eval(params, rng.random())?;
    let grad = match cfg.grad_estimator {
        GradEstimator::Spsa => grad_spsa(params, active, cfg.spsa_delta, |p, s| obj.eval(p, s), rng)?,
        GradEstimator::ParameterShift => grad_parameter_shift(params, active, |p, s| obj.eval(p, s), rng.random())?,
    };
    for &i in active {
        params[i] -= cfg.learning_rate * grad[i];
    }
    Ok(loss)
}

/// One QBGU update on the whole context batch: loads
/// `sum_x sqrt(P(x)) |x>|0>`, compares the circuit output with the loaded
/// joint target, and steps all parameters against the configured gradient
/// estimate. Returns the new parameters and the loss before the step.
pub fn qbgu_step(
    circuit: &ParamCircuit,
    params: &[f64],
    context_state: &Statevector,
    joint_target: &Statevector,
    cfg: &TrainConfig,
    rng: &mut SimRng,
) -> Result<(Vec<f64>, f64)> {
    let width = joint_target.n_qubits();
    if context_state.n_qubits() > width {
        return Err(Error::invalid("context register is wider than the target"));
    }
    let input = if context_state.n_qubits() == width {
        context_state.clone()
    } else {
        context_state.tensor(&Statevector::zero(width - context_state.n_qubits())?)?
    };
    let example = Example {
        input,
        target: joint_target.clone(),
    };
    let obj = Objective::new(circuit, &example, cfg, context_state.n_qubits());
    let active: Vec<usize> = (0..circuit.n_params()).collect();
    let mut new = params.to_vec();
    circuit.check_params(params)?;
    let loss = step(&obj, &mut new, &active, cfg, rng)?;
    Ok((new, loss))
}

fn run(
    circuit: &ParamCircuit,
    tasks: &[Task],
    schedule: impl Fn(usize) -> usize,
    cfg: &TrainConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let mut params = initial_params(circuit.n_params(), cfg);
    let mut rng = derived_rng(cfg.seed, 1);
    let mut curve = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let task = &tasks[schedule(epoch)];
        let obj = Objective::new(circuit, &task.example, cfg, task.context_bits);
        curve.push(step(&obj, &mut params, &task.active, cfg, &mut rng)?);
    }
    Ok((params, curve))
}

/// Trains the loader circuit to map `|0...0>` onto `sum_x sqrt(P(x)) |x>`.
pub fn train_distribution_loader(target: &EmpiricalDist, layers: usize, cfg: &TrainConfig) -> Result<TrainReport> {
    let arch = ModelArch::Loader {
        qubits: target.width(),
        layers,
    };
    let circuit = arch.build()?;
    let n = target.width();
    let task = Task {
        name: "target".into(),
        example: Example {
            input: Statevector::zero(n)?,
            target: dist_to_amplitudes(target, n)?,
        },
        active: (0..circuit.n_params()).collect(),
        context_bits: 0,
    };
    let (params, curve) = run(&circuit, std::slice::from_ref(&task), |_| 0, cfg)?;
    let mut out = task.example.input.clone();
    circuit.apply(&mut out, &params)?;
    let loaded = EmpiricalDist::from_weights(n, out.probabilities())?;
    Ok(TrainReport {
        loss_curve: curve,
        kl_per_asset: BTreeMap::from([(task.name.clone(), kl_divergence(target, &loaded, KL_EPS)?)]),
        kl_basis_per_asset: BTreeMap::new(),
        final_fidelity: BTreeMap::from([(task.name, fidelity(&out, &task.example.target)?)]),
        preservation_per_asset: BTreeMap::new(),
        epochs_run: cfg.epochs,
        final_params: params,
        circuit_hash: circuit.hash(),
        arch,
        config: cfg.clone(),
    })
}

fn asset_task(layout: &QubitLayout, asset: &AssetData, label: Option<usize>, active: Vec<usize>) -> Result<Task> {
    if asset.context_bits != layout.context.len() || asset.prediction_bits() != layout.prediction.len() {
        return Err(Error::invalid(format!(
            "asset '{}' has {}+{} bits, model expects {}+{}",
            asset.asset_id,
            asset.context_bits,
            asset.prediction_bits(),
            layout.context.len(),
            layout.prediction.len()
        )));
    }
    let input = batch_input(layout, &asset.context_dist(), label)?;
    let data_target = dist_to_amplitudes(&asset.joint, asset.joint.width())?;
    let target = match label {
        None => data_target,
        Some(k) => data_target.tensor(&Statevector::basis(layout.label.len(), k << 1)?)?,
    };
    Ok(Task {
        name: asset.asset_id.clone(),
        example: Example { input, target },
        active,
        context_bits: asset.context_bits,
    })
}

struct Diagnostics {
    kl: BTreeMap<String, f64>,
    kl_basis: BTreeMap<String, f64>,
    fidelity: BTreeMap<String, f64>,
    preservation: BTreeMap<String, f64>,
}

fn diagnose(circuit: &ParamCircuit, params: &[f64], layout: &QubitLayout, assets: &[AssetData], tasks: &[Task], labelled: bool) -> Result<Diagnostics> {
    let mut d = Diagnostics {
        kl: BTreeMap::new(),
        kl_basis: BTreeMap::new(),
        fidelity: BTreeMap::new(),
        preservation: BTreeMap::new(),
    };
    for (k, (asset, task)) in assets.iter().zip(tasks).enumerate() {
        let label = labelled.then_some(k);
        let batch = output_joint(circuit, params, layout, &task.example.input)?;
        d.kl.insert(task.name.clone(), weighted_conditional_kl(&asset.joint, &batch, asset.context_bits)?);
        let ctx = asset.context_dist();
        let basis = basis_model_joint(circuit, params, layout, &ctx, label)?;
        d.kl_basis.insert(task.name.clone(), weighted_conditional_kl(&asset.joint, &basis, asset.context_bits)?);
        let mut out = task.example.input.clone();
        circuit.apply(&mut out, params)?;
        d.fidelity.insert(task.name.clone(), fidelity(&out, &task.example.target)?);
        d.preservation
            .insert(task.name.clone(), context_preservation_score(circuit, params, layout, &ctx, label)?);
    }
    Ok(d)
}

/// Single-asset training of a layered PQC on the context and prediction
/// qubits, `layers` layers of `cfg.sublayers` rotation rounds.
pub fn train_qstl(asset: &AssetData, layers: usize, cfg: &TrainConfig) -> Result<TrainReport> {
    let arch = ModelArch::Qstl {
        context_bits: asset.context_bits,
        prediction_bits: asset.prediction_bits(),
        layers,
        sublayers: cfg.sublayers,
        entangler: cfg.entangler,
    };
    let circuit = arch.build()?;
    let layout = QubitLayout::model(asset.context_bits, asset.prediction_bits(), 0);
    let tasks = [asset_task(&layout, asset, None, (0..circuit.n_params()).collect())?];
    let (params, curve) = run(&circuit, &tasks, |_| 0, cfg)?;
    let d = diagnose(&circuit, &params, &layout, std::slice::from_ref(asset), &tasks, false)?;
    Ok(TrainReport {
        loss_curve: curve,
        kl_per_asset: d.kl,
        kl_basis_per_asset: d.kl_basis,
        final_fidelity: d.fidelity,
        preservation_per_asset: d.preservation,
        epochs_run: cfg.epochs,
        final_params: params,
        circuit_hash: circuit.hash(),
        arch,
        config: cfg.clone(),
    })
}

/// Asset trained during `epoch` under round-robin blocks of `block` epochs.
pub fn scheduled_asset(epoch: usize, block: usize, k: usize) -> usize {
    (epoch / block) % k
}

/// Multi-asset training of the share-and-specify circuit. Assets map to
/// labels in order; blocks of `cfg.block_epochs` epochs cycle through them.
/// Within a block only the shared slots and the active asset's slots move.
pub fn train_qmtl(assets: &[AssetData], spec: &ShareSpecifySpec, cfg: &TrainConfig) -> Result<TrainReport> {
    if assets.len() != spec.k {
        return Err(Error::invalid(format!(
            "{} assets given for a {}-asset model",
            assets.len(),
            spec.k
        )));
    }
    let arch = ModelArch::Qmtl { spec: spec.clone() };
    let circuit = arch.build()?;
    let layout = spec.layout();
    let tasks = assets
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let active = circuit.param_slots_with(|t| t == BlockTag::Shared || t == BlockTag::Specific(k));
            asset_task(&layout, a, Some(k), active)
        })
        .collect::<Result<Vec<_>>>()?;
    let (params, curve) = run(&circuit, &tasks, |e| scheduled_asset(e, cfg.block_epochs, spec.k), cfg)?;
    let d = diagnose(&circuit, &params, &layout, assets, &tasks, true)?;
    Ok(TrainReport {
        loss_curve: curve,
        kl_per_asset: d.kl,
        kl_basis_per_asset: d.kl_basis,
        final_fidelity: d.fidelity,
        preservation_per_asset: d.preservation,
        epochs_run: cfg.epochs,
        final_params: params,
        circuit_hash: circuit.hash(),
        arch,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::copy_last_joint;
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_epochs_returns_initial_params() {
        let asset = AssetData::from_joint("rule", copy_last_joint(3).unwrap(), 3).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let r = train_qstl(&asset, 4, &cfg).unwrap();
        assert!(r.loss_curve.is_empty());
        assert_eq!(r.final_params, initial_params(32, &cfg));
        assert_eq!(r.epochs_run, 0);
    }

    #[test]
    fn zero_learning_rate_keeps_params() {
        let c = crate::ansatz::build_loader_circuit(2, 1).unwrap();
        let ctx = Statevector::zero(2).unwrap();
        let tgt = Statevector::zero(2).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default().exact()
        };
        let p = vec![0.3; 4];
        let (new, loss) = qbgu_step(&c, &p, &ctx, &tgt, &cfg, &mut rng_from_seed(1)).unwrap();
        assert_eq!(new, p);
        assert!(loss > 0.0);
    }

    #[test]
    fn loader_delta_target_starts_at_zero_loss() {
        let cfg = TrainConfig {
            epochs: 5,
            init: InitScheme::Zeros,
            ..TrainConfig::default().exact()
        };
        let r = train_distribution_loader(&EmpiricalDist::delta(3, 0).unwrap(), 4, &cfg).unwrap();
        assert!(r.loss_curve[0] < 1e-15);
    }

    #[test]
    fn schedule_is_round_robin() {
        let seq: Vec<usize> = (0..10).map(|e| scheduled_asset(e, 2, 3)).collect();
        assert_eq!(seq, vec![0, 0, 1, 1, 2, 2, 0, 0, 1, 1]);
    }
}
