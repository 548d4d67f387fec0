use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{entangler_block, rotation_block, Entangler};
use crate::circuit::{BlockTag, CircuitBuilder, ParamCircuit};
use crate::error::{Error, Result};
use crate::simulator::gate::{Control, GateOp};
use crate::simulator::layout::QubitLayout;
use crate::simulator::state::Statevector;

/// How specific blocks are conditioned on the label register.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Rotations carry one polarity control per label index qubit.
    #[default]
    Direct,
    /// A Toffoli pattern writes `[label == k]` onto the work qubit, the
    /// rotations are controlled by that qubit, and the pattern is undone.
    Toffoli,
}

impl std::str::FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(LabelMode::Direct),
            "toffoli" => Ok(LabelMode::Toffoli),
            _ => Err(Error::Config(format!("unknown label mode '{s}' (direct|toffoli)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareSpecifySpec {
    /// Context length in symbols.
    pub t: usize,
    /// Prediction length in symbols.
    pub tau: usize,
    /// Number of assets; a power of two, at least 2.
    pub k: usize,
    pub layers: usize,
    pub sublayers: usize,
    pub entangler: Entangler,
    pub bits_per_symbol: usize,
    pub label_mode: LabelMode,
}

impl ShareSpecifySpec {
    pub fn new(t: usize, tau: usize, k: usize, layers: usize, sublayers: usize) -> Self {
        ShareSpecifySpec {
            t,
            tau,
            k,
            layers,
            sublayers,
            entangler: Entangler::Ring,
            bits_per_symbol: 1,
            label_mode: LabelMode::Direct,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || !self.k.is_power_of_two() {
            return Err(Error::invalid(format!(
                "asset count {} must be a power of two >= 2",
                self.k
            )));
        }
        if self.t == 0 || self.tau == 0 || self.layers == 0 || self.sublayers == 0 {
            return Err(Error::invalid("T, tau, L and c must all be positive"));
        }
        if self.bits_per_symbol == 0 {
            return Err(Error::invalid("bits per symbol must be positive"));
        }
        Ok(())
    }

    pub fn label_index_width(&self) -> usize {
        self.k.trailing_zeros() as usize
    }

    /// Index qubits plus one work qubit.
    pub fn label_width(&self) -> usize {
        self.label_index_width() + 1
    }

    pub fn data_qubits(&self) -> usize {
        (self.t + self.tau) * self.bits_per_symbol
    }

    pub fn layout(&self) -> QubitLayout {
        QubitLayout::model(
            self.t * self.bits_per_symbol,
            self.tau * self.bits_per_symbol,
            self.label_width(),
        )
    }

    /// Trainable parameters on one asset's path: shared plus its own block.
    pub fn params_per_asset(&self) -> usize {
        2 * self.layers * self.data_qubits() * self.sublayers
    }
}

/// Per layer: shared rotations and entangler on the data qubits, then for
/// each asset `k` its label-conditioned rotations, then the entangler again.
pub fn build_share_specify(spec: &ShareSpecifySpec) -> Result<ParamCircuit> {
    spec.validate()?;
    let layout = spec.layout();
    let data = layout.data();
    let label0 = layout.label.start;
    let work = layout.label_work().expect("label register is never empty");
    let mut b = CircuitBuilder::default();
    for l in 1..=spec.layers {
        rotation_block(&mut b, data.clone(), spec.sublayers, l, BlockTag::Shared, &[]);
        entangler_block(&mut b, data.clone(), spec.entangler, l);
        for k in 0..spec.k {
            let pattern = label_pattern(spec.k, k, label0);
            let toffoli = spec.label_mode == LabelMode::Toffoli && spec.k > 2;
            if toffoli {
                let compute = label_control_gates(spec.k, k, label0, work);
                for g in &compute {
                    b.push(g.clone(), l, BlockTag::LabelControl);
                }
                rotation_block(&mut b, data.clone(), spec.sublayers, l, BlockTag::Specific(k), &[Control::on(work)]);
                for g in compute {
                    b.push(g, l, BlockTag::LabelControl);
                }
            } else {
                rotation_block(&mut b, data.clone(), spec.sublayers, l, BlockTag::Specific(k), &pattern);
            }
        }
        entangler_block(&mut b, data.clone(), spec.entangler, l);
    }
    b.finish(layout.model_width())
}

/// Controls selecting label value `k` on index qubits starting at `first`,
/// most significant bit first.
fn label_pattern(k_total: usize, k: usize, first: usize) -> Vec<Control> {
    let m = k_total.trailing_zeros() as usize;
    (0..m)
        .map(|j| Control {
            qubit: first + j,
            polarity: (k >> (m - 1 - j)) & 1 == 1,
        })
        .collect()
}

fn label_control_gates(k_total: usize, k: usize, first: usize, work: usize) -> Vec<GateOp> {
    let pattern = label_pattern(k_total, k, first);
    if pattern.len() == 1 {
        let c = pattern[0];
        return vec![GateOp::x(work).with_control(c)];
    }
    let flips: Vec<GateOp> = pattern
        .iter()
        .filter(|c| !c.polarity)
        .map(|c| GateOp::x(c.qubit))
        .collect();
    let mut out = flips.clone();
    let ccnot = GateOp {
        controls: pattern.iter().map(|c| Control::on(c.qubit)).collect(),
        ..GateOp::ccnot(pattern[0].qubit, pattern[1].qubit, work)
    };
    out.push(ccnot);
    out.extend(flips);
    out
}

/// Gates that flip the work qubit iff the label register holds `k`, on a
/// register of `log2(K)` index qubits followed by the work qubit.
///
/// For `K == 2` this is a single polarity-controlled X; otherwise X gates on
/// the index wires whose bit of `k` is 0, a multi-controlled X, and the same
/// X gates again.
pub fn build_label_control(k_total: usize, k: usize) -> Result<Vec<GateOp>> {
    if k_total < 2 || !k_total.is_power_of_two() {
        return Err(Error::invalid(format!(
            "asset count {k_total} must be a power of two >= 2"
        )));
    }
    if k >= k_total {
        return Err(Error::invalid(format!("label {k} out of range for K={k_total}")));
    }
    let m = k_total.trailing_zeros() as usize;
    Ok(label_control_gates(k_total, k, 0, m))
}

/// `sum_k sqrt(w_k / sum w) |k>` on the index qubits, work qubit `|0>`.
pub fn prepare_label(weights: &[f64]) -> Result<Statevector> {
    let k_total = weights.len();
    if k_total < 2 || !k_total.is_power_of_two() {
        return Err(Error::invalid(format!(
            "weight count {k_total} must be a power of two >= 2"
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("weights must not all be zero"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * k_total];
    for (k, w) in weights.iter().enumerate() {
        amps[k << 1] = Complex64::new((w / total).sqrt(), 0.0);
    }
    Statevector::normalized(amps)
}
