//! Gate depolarizing noise and readout bit flips, simulated by Monte-Carlo
//! trajectories over pure states.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::data::dist::{Counts, EmpiricalDist};
use crate::error::{Error, Result};
use crate::inference::{kl_divergence, KL_EPS};
use crate::rng::{derived_rng, SimRng};
use crate::simulator::gate::Pauli;
use crate::simulator::measure::{marginal_probs, sample_bitstrings, sample_dist};
use crate::simulator::state::{format_bits, parse_bits, Statevector};

pub const DEFAULT_TRAJECTORIES: usize = 100;

/// Noise applied by [`noisy_execute`].
///
/// After every gate, each qubit the gate touches (controls included) gets a
/// uniformly random X, Y or Z with probability `depolarizing_p`. Every
/// measured bit flips with probability `readout_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depolarizing_p: f64,
    pub readout_p: f64,
    pub trajectories: usize,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            depolarizing_p: 0.0,
            readout_p: 0.0,
            trajectories: DEFAULT_TRAJECTORIES,
        }
    }
}

impl NoiseModel {
    pub fn new(depolarizing_p: f64, readout_p: f64) -> Self {
        NoiseModel {
            depolarizing_p,
            readout_p,
            ..Self::default()
        }
    }

    pub fn of_kind(kind: NoiseKind, p: f64, trajectories: usize) -> Self {
        let (d, r) = match kind {
            NoiseKind::Depolarizing => (p, 0.0),
            NoiseKind::Readout => (0.0, p),
        };
        NoiseModel {
            depolarizing_p: d,
            readout_p: r,
            trajectories,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("depolarizing", self.depolarizing_p), ("readout", self.readout_p)] {
            check_prob(name, p)?;
        }
        if self.trajectories == 0 {
            return Err(Error::Config("at least one trajectory is required".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_p == 0.0 && self.readout_p == 0.0
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    Readout,
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Readout => "readout",
        })
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            "readout" => Ok(NoiseKind::Readout),
            _ => Err(Error::Config(format!("unknown noise kind '{s}' (depolarizing|readout)"))),
        }
    }
}

/// Runs the circuit with a random Pauli after each gate on each touched
/// qubit with probability `p`. With `p == 0` no random numbers are drawn.
pub fn run_depolarized(circuit: &ParamCircuit, params: &[f64], state: &mut Statevector, p: f64, rng: &mut SimRng) -> Result<()> {
    check_prob("depolarizing", p)?;
    if p == 0.0 {
        return circuit.apply(state, params);
    }
    circuit.check_params(params)?;
    if state.n_qubits() != circuit.n_qubits() {
        return Err(Error::invalid(format!(
            "circuit acts on {} qubits, state has {}",
            circuit.n_qubits(),
            state.n_qubits()
        )));
    }
    for g in circuit.gates() {
        let theta = g.op.param_slot.map_or(0.0, |s| params[s]);
        state.apply_unchecked(&g.op, theta);
        for q in g.op.touched() {
            // Both draws are always taken so that error sites for different
            // p share one random sequence.
            let u: f64 = rng.random();
            let which = rng.random_range(0..3);
            if u < p {
                state.apply_pauli(q, [Pauli::X, Pauli::Y, Pauli::Z][which]);
            }
        }
    }
    Ok(())
}

/// Flips each bit of each counted string independently with probability `p`.
pub fn apply_readout_error(counts: &Counts, p: f64, rng: &mut SimRng) -> Result<Counts> {
    check_prob("readout", p)?;
    let w = counts.width;
    if p == 0.0 || counts.total() == 0 {
        return Ok(counts.clone());
    }
    // Distribution of the flip mask.
    let masks: Vec<f64> = (0..1usize << w)
        .map(|m| {
            let k = m.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(w as i32 - k)
        })
        .collect();
    let masks = EmpiricalDist::from_weights(w, masks)?;
    let mut out = Counts::new(w);
    for (bits, &n) in &counts.counts {
        let x = parse_bits(bits)?;
        for (m, k) in sample_dist(&masks, n, rng).dense().into_iter().enumerate() {
            out.add(x ^ m, k);
        }
    }
    Ok(out)
}

fn shots_for(t: usize, trajectories: usize, shots: u64) -> u64 {
    let n = trajectories as u64;
    shots / n + u64::from((t as u64) < shots % n)
}

/// Per-trajectory outcome counts on `measured`. Trajectory `t` draws gate
/// errors from stream `2t` and measurement and readout flips from stream
/// `2t + 1` of `seed`, and takes an even share of `shots`.
pub fn noisy_trajectories(
    circuit: &ParamCircuit,
    params: &[f64],
    input: &Statevector,
    measured: &[usize],
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<Counts>> {
    model.validate()?;
    let clean = if model.depolarizing_p == 0.0 {
        let mut s = input.clone();
        circuit.apply(&mut s, params)?;
        Some(marginal_probs(&s, measured)?)
    } else {
        None
    };
    (0..model.trajectories)
        .into_par_iter()
        .map(|t| {
            let dist = match &clean {
                Some(d) => d.clone(),
                None => {
                    let mut s = input.clone();
                    run_depolarized(circuit, params, &mut s, model.depolarizing_p, &mut derived_rng(seed, 2 * t as u64))?;
                    marginal_probs(&s, measured)?
                }
            };
            let mut rng = derived_rng(seed, 2 * t as u64 + 1);
            let counts = sample_dist(&dist, shots_for(t, model.trajectories, shots), &mut rng);
            apply_readout_error(&counts, model.readout_p, &mut rng)
        })
        .collect()
}

/// Pooled outcome distribution on `measured` under `model`. A noiseless
/// model samples exactly as [`sample_bitstrings`] with the same seed.
pub fn noisy_execute(
    circuit: &ParamCircuit,
    params: &[f64],
    input: &Statevector,
    measured: &[usize],
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<EmpiricalDist> {
    if shots == 0 {
        return Err(Error::invalid("noisy execution needs at least one shot"));
    }
    model.validate()?;
    if model.is_noiseless() {
        let mut s = input.clone();
        circuit.apply(&mut s, params)?;
        return sample_bitstrings(&s, measured, shots, seed)?.to_dist();
    }
    pool(&noisy_trajectories(circuit, params, input, measured, model, shots, seed)?)
}

fn pool(trajectories: &[Counts]) -> Result<EmpiricalDist> {
    let w = trajectories[0].width;
    let mut total = vec![0.0; 1 << w];
    for c in trajectories {
        for (i, n) in c.dense().into_iter().enumerate() {
            total[i] += n as f64;
        }
    }
    EmpiricalDist::from_weights(w, total)
}

/// One point of a noise sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub kind: NoiseKind,
    /// Mean over trajectories of KL(noiseless || trajectory outcome frequencies).
    pub kl: f64,
    /// KL(noiseless || outcome frequencies pooled over all trajectories).
    pub pooled_kl: f64,
}

/// KL between the exact noiseless distribution on `measured` and the noisy
/// outcome frequencies, for each noise probability. Every point reuses the
/// same seed, so error sites grow with `p` along one random sequence.
#[allow(clippy::too_many_arguments)]
pub fn noise_sweep(
    circuit: &ParamCircuit,
    params: &[f64],
    input: &Statevector,
    measured: &[usize],
    probabilities: &[f64],
    kind: NoiseKind,
    shots: u64,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if probabilities.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Config("noise probabilities must be sorted ascending".into()));
    }
    if trajectories == 0 || shots < trajectories as u64 {
        return Err(Error::Config(format!(
            "{shots} shots cannot be split over {trajectories} trajectories"
        )));
    }
    let mut clean = input.clone();
    circuit.apply(&mut clean, params)?;
    let reference = marginal_probs(&clean, measured)?;
    probabilities
        .iter()
        .map(|&p| {
            let model = NoiseModel::of_kind(kind, p, trajectories);
            let runs = noisy_trajectories(circuit, params, input, measured, &model, shots, seed)?;
            let mut kl = 0.0;
            for c in &runs {
                kl += kl_divergence(&reference, &c.to_dist()?, KL_EPS)?;
            }
            Ok(SweepPoint {
                p,
                kind,
                kl: kl / runs.len() as f64,
                pooled_kl: kl_divergence(&reference, &pool(&runs)?, KL_EPS)?,
            })
        })
        .collect()
}

/// `p,kind,kl` rows.
pub fn write_sweep_csv(path: impl AsRef<Path>, points: &[SweepPoint]) -> Result<()> {
    crate::io::write_csv(
        path,
        &["p", "kind", "kl"],
        points.iter().map(|s| [s.p.to_string(), s.kind.to_string(), s.kl.to_string()]),
    )
}

/// Outcome string with every bit complemented.
pub fn complement(bits: &str) -> Result<String> {
    let x = parse_bits(bits)?;
    Ok(format_bits(!x & ((1usize << bits.len()) - 1), bits.len()))
}
