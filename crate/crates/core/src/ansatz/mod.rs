//! Circuit builders: distribution loader, layered PQC, share-and-specify.

mod share_specify;

pub use share_specify::{build_label_control, build_share_specify, prepare_label, LabelMode, ShareSpecifySpec};

use serde::{Deserialize, Serialize};

use crate::circuit::{BlockTag, CircuitBuilder, ParamCircuit};
use crate::error::{Error, Result};
use crate::simulator::gate::GateOp;

/// Fixed entangling block closing each layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    /// CNOT `j -> (j+1) mod n` for every `j`; no gate when `n == 1`.
    #[default]
    Ring,
    Identity,
}

impl std::str::FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(Entangler::Ring),
            "identity" => Ok(Entangler::Identity),
            _ => Err(Error::Config(format!("unknown entangler '{s}' (ring|identity)"))),
        }
    }
}

/// Hardware-efficient loader on `t` qubits: per layer RY on all, RZ on all,
/// then a CNOT ring. `2*t*layers` parameters.
pub fn build_loader_circuit(t: usize, layers: usize) -> Result<ParamCircuit> {
    build_layered_pqc(t, layers, 2, Entangler::Ring)
}

/// `layers` repetitions of `sublayers` rotation rounds (axes RY, RZ, RY, ...)
/// over all `n` qubits followed by the entangler. `layers*n*sublayers`
/// parameters.
pub fn build_layered_pqc(
    n: usize,
    layers: usize,
    sublayers: usize,
    entangler: Entangler,
) -> Result<ParamCircuit> {
    if n == 0 || layers == 0 || sublayers == 0 {
        return Err(Error::invalid(format!(
            "qubits, layers and sublayers must be positive (got n={n}, L={layers}, c={sublayers})"
        )));
    }
    let mut b = CircuitBuilder::default();
    for l in 1..=layers {
        rotation_block(&mut b, 0..n, sublayers, l, BlockTag::Shared, &[]);
        entangler_block(&mut b, 0..n, entangler, l);
    }
    b.finish(n)
}

pub fn param_count(circuit: &ParamCircuit) -> usize {
    circuit.n_params()
}

fn rotation_block(
    b: &mut CircuitBuilder,
    qubits: std::ops::Range<usize>,
    sublayers: usize,
    layer: usize,
    tag: BlockTag,
    controls: &[crate::simulator::gate::Control],
) {
    for s in 0..sublayers {
        for q in qubits.clone() {
            let slot = b.slot();
            let op = if s % 2 == 0 {
                GateOp::ry(q, slot)
            } else {
                GateOp::rz(q, slot)
            };
            b.push(op.with_controls(controls.iter().copied()), layer, tag);
        }
    }
}

fn entangler_block(
    b: &mut CircuitBuilder,
    qubits: std::ops::Range<usize>,
    entangler: Entangler,
    layer: usize,
) {
    if entangler == Entangler::Identity || qubits.len() < 2 {
        return;
    }
    let (start, n) = (qubits.start, qubits.len());
    for j in 0..n {
        b.push(
            GateOp::cnot(start + j, start + (j + 1) % n),
            layer,
            BlockTag::Entangler,
        );
    }
}
