use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Wire assignment of a model register, top to bottom: context, prediction,
/// label (index qubits then one work qubit).
///
/// During sampled-mode loss evaluation the swap-test register is
/// `ancilla | model | target copy`, see [`QubitLayout::swap_register`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    pub context: Range<usize>,
    pub prediction: Range<usize>,
    pub label: Range<usize>,
    pub target_copy: Range<usize>,
    pub swap_ancilla: Option<usize>,
}

impl QubitLayout {
    pub fn model(context_bits: usize, prediction_bits: usize, label_width: usize) -> Self {
        let c = context_bits;
        let p = c + prediction_bits;
        QubitLayout {
            context: 0..c,
            prediction: c..p,
            label: p..p + label_width,
            target_copy: 0..0,
            swap_ancilla: None,
        }
    }

    /// Data qubits: context followed by prediction.
    pub fn data(&self) -> Range<usize> {
        self.context.start..self.prediction.end
    }

    pub fn model_width(&self) -> usize {
        self.label.end
    }

    pub fn n_qubits(&self) -> usize {
        if self.swap_ancilla.is_some() {
            self.target_copy.end
        } else {
            self.model_width()
        }
    }

    /// Label index qubits (excluding the work qubit).
    pub fn label_index(&self) -> Range<usize> {
        if self.label.is_empty() {
            self.label.clone()
        } else {
            self.label.start..self.label.end - 1
        }
    }

    pub fn label_work(&self) -> Option<usize> {
        (!self.label.is_empty()).then(|| self.label.end - 1)
    }

    /// Same model shifted down by one wire, with the ancilla on top and a
    /// copy register for the target state below.
    pub fn swap_register(&self) -> Self {
        let n = self.model_width();
        let shift = |r: &Range<usize>| r.start + 1..r.end + 1;
        QubitLayout {
            context: shift(&self.context),
            prediction: shift(&self.prediction),
            label: shift(&self.label),
            target_copy: n + 1..2 * n + 1,
            swap_ancilla: Some(0),
        }
    }
}
