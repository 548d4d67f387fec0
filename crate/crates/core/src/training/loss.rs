use num_complex::Complex64;

use super::config::{LossKind, TrainConfig};
use crate::circuit::ParamCircuit;
use crate::data::dist::EmpiricalDist;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::simulator::measure::sample_dist;
use crate::simulator::state::{fidelity, Statevector};
use crate::simulator::swap_test::{fidelity_from_p0, swap_test_estimate_with};

/// `sum_x sqrt(P(x)) |x>` on `width` qubits. The distribution's bits occupy
/// the leading qubits; any extra qubits are `|0>`.
pub fn dist_to_amplitudes(dist: &EmpiricalDist, width: usize) -> Result<Statevector> {
    if dist.width() > width {
        return Err(Error::invalid(format!(
            "a {}-bit distribution does not fit {width} qubits",
            dist.width()
        )));
    }
    let shift = width - dist.width();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    for (i, p) in dist.probs().iter().enumerate() {
        amps[i << shift] = Complex64::new(p.sqrt(), 0.0);
    }
    Statevector::normalized(amps)
}

/// `(1 - |<out|target>|^2) / 2`.
pub fn fidelity_loss(out: &Statevector, target: &Statevector) -> Result<f64> {
    Ok((1.0 - fidelity(out, target)?) / 2.0)
}

/// `sum_x (measured(x) - target(x))^2`.
pub fn mse_loss(measured: &EmpiricalDist, target: &EmpiricalDist) -> Result<f64> {
    measured.check_same_width(target)?;
    Ok(measured
        .probs()
        .iter()
        .zip(target.probs())
        .map(|(a, b)| (a - b).powi(2))
        .sum())
}

/// What the circuit output is compared against.
#[derive(Clone, Debug)]
pub enum LossTarget {
    State(Statevector),
    Dist(EmpiricalDist),
}

/// One training example: a circuit input and the matching target state.
#[derive(Clone, Debug)]
pub struct Example {
    pub input: Statevector,
    pub target: Statevector,
}

/// Loss of one circuit on one example, with a fixed loss kind, shot budget
/// and optional context twirl.
#[derive(Clone, Debug)]
pub struct Objective<'a> {
    pub circuit: &'a ParamCircuit,
    pub example: &'a Example,
    pub loss: LossKind,
    pub shots: u64,
    /// Number of leading qubits whose sign patterns are averaged over; 0 disables.
    pub twirl_bits: usize,
}

impl Objective<'_> {
    pub fn new<'a>(circuit: &'a ParamCircuit, example: &'a Example, cfg: &TrainConfig, context_bits: usize) -> Objective<'a> {
        Objective {
            circuit,
            example,
            loss: cfg.loss,
            shots: cfg.shots,
            twirl_bits: if cfg.context_twirl { context_bits } else { 0 },
        }
    }

    /// Loss at `params`. `seed` drives shot sampling and is ignored in exact mode.
    pub fn eval(&self, params: &[f64], seed: u64) -> Result<f64> {
        if self.twirl_bits == 0 {
            return self.eval_pair(&self.example.input, &self.example.target, params, self.shots, seed);
        }
        let n_signs = 1usize << self.twirl_bits;
        let shots = self.shots.div_ceil(n_signs as u64);
        let mut total = 0.0;
        for s in 0..n_signs {
            let input = sign_pattern(&self.example.input, s, self.twirl_bits);
            let target = sign_pattern(&self.example.target, s, self.twirl_bits);
            total += self.eval_pair(&input, &target, params, shots, seed.wrapping_add(s as u64))?;
        }
        Ok(total / n_signs as f64)
    }

    fn eval_pair(&self, input: &Statevector, target: &Statevector, params: &[f64], shots: u64, seed: u64) -> Result<f64> {
        let mut out = input.clone();
        self.circuit.apply(&mut out, params)?;
        match self.loss {
            LossKind::Fidelity if shots == 0 => fidelity_loss(&out, target),
            LossKind::Fidelity => {
                let p0 = swap_test_estimate_with(&out, target, shots, &mut rng_from_seed(seed))?;
                Ok((1.0 - fidelity_from_p0(p0)) / 2.0)
            }
            LossKind::Mse => {
                let n = out.n_qubits();
                let target = EmpiricalDist::from_weights(n, target.probabilities())?;
                let exact = EmpiricalDist::from_weights(n, out.probabilities())?;
                let measured = if shots == 0 {
                    exact
                } else {
                    sample_dist(&exact, shots, &mut rng_from_seed(seed)).to_dist()?
                };
                mse_loss(&measured, &target)
            }
        }
    }
}

/// Multiplies each amplitude by `(-1)^(s . x)`, `x` the leading `bits` qubits.
fn sign_pattern(state: &Statevector, s: usize, bits: usize) -> Statevector {
    if s == 0 {
        return state.clone();
    }
    let shift = state.n_qubits() - bits;
    let amps = state
        .amps()
        .iter()
        .enumerate()
        .map(|(i, a)| if ((i >> shift) & s).count_ones() % 2 == 1 { -a } else { *a })
        .collect();
    Statevector::from_amplitudes(amps).expect("sign flips keep the norm")
}

/// Loss of `circuit(params)` on `input` against a target state or
/// distribution, using `cfg.loss`, `cfg.shots` and `cfg.seed`.
pub fn loss_eval(
    circuit: &ParamCircuit,
    params: &[f64],
    input: &Statevector,
    target: &LossTarget,
    cfg: &TrainConfig,
) -> Result<f64> {
    let target = match target {
        LossTarget::State(s) => s.clone(),
        LossTarget::Dist(d) => dist_to_amplitudes(d, input.n_qubits())?,
    };
    input.check_same_width(&target)?;
    let example = Example {
        input: input.clone(),
        target,
    };
    let obj = Objective {
        circuit,
        example: &example,
        loss: cfg.loss,
        shots: cfg.shots,
        twirl_bits: 0,
    };
    obj.eval(params, cfg.seed)
}
