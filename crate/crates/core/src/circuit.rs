use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::simulator::gate::{Control, GateOp};
use crate::simulator::state::Statevector;

/// Role of a gate inside a circuit family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTag {
    Shared,
    Specific(usize),
    LabelControl,
    Entangler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedGate {
    #[serde(flatten)]
    pub op: GateOp,
    /// 1-based layer index.
    pub layer: usize,
    pub block_tag: BlockTag,
}

/// Ordered gate list with parameter-slot bindings.
///
/// Every slot in `0..n_params` is bound to exactly one rotation gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamCircuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<PlacedGate>,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<PlacedGate>) -> Result<Self> {
        let mut bound = vec![0usize; n_params];
        for g in &gates {
            g.op.validate(n_qubits)?;
            if let Some(s) = g.op.param_slot {
                if s >= n_params {
                    return Err(Error::invalid(format!(
                        "parameter slot {s} out of range for {n_params} parameters"
                    )));
                }
                bound[s] += 1;
            }
        }
        if let Some(s) = bound.iter().position(|&c| c != 1) {
            return Err(Error::invalid(format!(
                "parameter slot {s} is bound to {} gates, expected exactly one",
                bound[s]
            )));
        }
        Ok(ParamCircuit {
            n_qubits,
            n_params,
            gates,
        })
    }

    /// Circuit with no gates.
    pub fn empty(n_qubits: usize) -> Self {
        ParamCircuit {
            n_qubits,
            n_params: 0,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[PlacedGate] {
        &self.gates
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::invalid(format!(
                "circuit has {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        Ok(())
    }

    /// Applies all gates in order, in place.
    pub fn apply(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::invalid(format!(
                "circuit acts on {} qubits, state has {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        for g in &self.gates {
            let theta = g.op.param_slot.map_or(0.0, |s| params[s]);
            state.apply_unchecked(&g.op, theta);
        }
        Ok(())
    }

    /// Sorted parameter slots of the gates whose tag satisfies `keep`.
    pub fn param_slots_with<F: Fn(BlockTag) -> bool>(&self, keep: F) -> Vec<usize> {
        let mut slots: Vec<usize> = self
            .gates
            .iter()
            .filter(|g| keep(g.block_tag))
            .filter_map(|g| g.op.param_slot)
            .collect();
        slots.sort_unstable();
        slots
    }

    /// Gate listing for export: one object per gate.
    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "gates": self.gates,
        })
    }

    /// Hex SHA-256 of the compact gate listing.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.describe()).expect("circuit serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// The circuit seen by asset `k` once its label is fixed: shared and
    /// entangler gates unchanged, asset `k`'s specific gates with their label
    /// controls removed, everything else dropped. Label wires are removed, so
    /// the result acts on the leading `n_qubits - label_width` qubits.
    ///
    /// Returns the reduced circuit and, for each of its slots, the slot of the
    /// full circuit it came from.
    pub fn reduced_for_label(&self, k: usize, label_width: usize) -> Result<(ParamCircuit, Vec<usize>)> {
        if label_width == 0 || label_width >= self.n_qubits {
            return Err(Error::invalid(format!(
                "label width {label_width} invalid for a {}-qubit circuit",
                self.n_qubits
            )));
        }
        let n_data = self.n_qubits - label_width;
        let mut slot_map = Vec::new();
        let mut gates = Vec::new();
        for g in &self.gates {
            let keep = match g.block_tag {
                BlockTag::Shared | BlockTag::Entangler => true,
                BlockTag::Specific(j) => j == k,
                BlockTag::LabelControl => false,
            };
            if !keep {
                continue;
            }
            let mut op = g.op.clone();
            op.controls.retain(|c: &Control| c.qubit < n_data);
            if op.touched().any(|q| q >= n_data) {
                return Err(Error::invalid(format!(
                    "gate {} targets a label wire and cannot be reduced",
                    op.kind
                )));
            }
            if let Some(s) = op.param_slot {
                op.param_slot = Some(slot_map.len());
                slot_map.push(s);
            }
            gates.push(PlacedGate {
                op,
                layer: g.layer,
                block_tag: g.block_tag,
            });
        }
        let reduced = ParamCircuit::new(n_data, slot_map.len(), gates)?;
        Ok((reduced, slot_map))
    }
}

/// Returns `circuit(params)|state>`.
pub fn apply_circuit(state: &Statevector, circuit: &ParamCircuit, params: &[f64]) -> Result<Statevector> {
    let mut out = state.clone();
    circuit.apply(&mut out, params)?;
    Ok(out)
}

/// Incrementally assigns slots while building a circuit.
#[derive(Debug, Default)]
pub(crate) struct CircuitBuilder {
    gates: Vec<PlacedGate>,
    next_slot: usize,
}

impl CircuitBuilder {
    pub(crate) fn slot(&mut self) -> usize {
        self.next_slot += 1;
        self.next_slot - 1
    }

    pub(crate) fn push(&mut self, op: GateOp, layer: usize, block_tag: BlockTag) {
        self.gates.push(PlacedGate { op, layer, block_tag });
    }

    pub(crate) fn finish(self, n_qubits: usize) -> Result<ParamCircuit> {
        ParamCircuit::new(n_qubits, self.next_slot, self.gates)
    }
}
