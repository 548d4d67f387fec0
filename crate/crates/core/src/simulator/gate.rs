use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::Statevector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    X,
    H,
    Cnot,
    Ccnot,
    Swap,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    fn min_controls(self) -> usize {
        match self {
            GateKind::Cnot => 1,
            GateKind::Ccnot => 2,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
            GateKind::Ccnot => "CCNOT",
            GateKind::Swap => "SWAP",
        };
        f.write_str(s)
    }
}

/// A control wire. `polarity == true` fires on `|1>`, `false` on `|0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, u8)", into = "(usize, u8)")]
pub struct Control {
    pub qubit: usize,
    pub polarity: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, polarity: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, polarity: false }
    }
}

impl From<(usize, u8)> for Control {
    fn from((qubit, pol): (usize, u8)) -> Self {
        Control { qubit, polarity: pol != 0 }
    }
}

impl From<Control> for (usize, u8) {
    fn from(c: Control) -> Self {
        (c.qubit, c.polarity as u8)
    }
}

/// One gate in a circuit. CNOT and CCNOT are X gates with one/two (or
/// more) controls; SWAP exchanges `target` and `partner`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
    #[serde(default)]
    pub controls: Vec<Control>,
    #[serde(default)]
    pub param_slot: Option<usize>,
}

impl GateOp {
    fn fixed(kind: GateKind, target: usize) -> Self {
        GateOp {
            kind,
            target,
            partner: None,
            controls: Vec::new(),
            param_slot: None,
        }
    }

    fn rotation(kind: GateKind, target: usize, slot: usize) -> Self {
        GateOp {
            param_slot: Some(slot),
            ..Self::fixed(kind, target)
        }
    }

    pub fn rx(target: usize, slot: usize) -> Self {
        Self::rotation(GateKind::Rx, target, slot)
    }

    pub fn ry(target: usize, slot: usize) -> Self {
        Self::rotation(GateKind::Ry, target, slot)
    }

    pub fn rz(target: usize, slot: usize) -> Self {
        Self::rotation(GateKind::Rz, target, slot)
    }

    pub fn x(target: usize) -> Self {
        Self::fixed(GateKind::X, target)
    }

    pub fn h(target: usize) -> Self {
        Self::fixed(GateKind::H, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cnot, target).with_control(Control::on(control))
    }

    pub fn ccnot(c1: usize, c2: usize, target: usize) -> Self {
        Self::fixed(GateKind::Ccnot, target)
            .with_control(Control::on(c1))
            .with_control(Control::on(c2))
    }

    pub fn swap(a: usize, b: usize) -> Self {
        GateOp {
            partner: Some(b),
            ..Self::fixed(GateKind::Swap, a)
        }
    }

    pub fn with_control(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    /// Every qubit the gate reads or writes.
    pub fn touched(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target)
            .chain(self.partner)
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    /// Structural checks against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = Vec::with_capacity(2 + self.controls.len());
        for q in self.touched() {
            if q >= n_qubits {
                return Err(Error::invalid(format!(
                    "{} touches qubit {q} outside a {n_qubits}-qubit register",
                    self.kind
                )));
            }
            if seen.contains(&q) {
                return Err(Error::invalid(format!(
                    "{} uses qubit {q} more than once",
                    self.kind
                )));
            }
            seen.push(q);
        }
        if self.kind.is_rotation() != self.param_slot.is_some() {
            return Err(Error::invalid(format!(
                "{} must {}carry a parameter slot",
                self.kind,
                if self.kind.is_rotation() { "" } else { "not " }
            )));
        }
        if (self.kind == GateKind::Swap) != self.partner.is_some() {
            return Err(Error::invalid("only SWAP carries a partner qubit"));
        }
        if self.controls.len() < self.kind.min_controls() {
            return Err(Error::invalid(format!(
                "{} needs at least {} control(s)",
                self.kind,
                self.kind.min_controls()
            )));
        }
        Ok(())
    }
}

pub(crate) type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `exp(-i theta P / 2)` for the rotation kinds; fixed single-qubit
/// matrices otherwise.
pub(crate) fn matrix(kind: GateKind, theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    match kind {
        GateKind::Rx => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::Ry => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::Rz => [
            [Complex64::new(c, -s), ZERO],
            [ZERO, Complex64::new(c, s)],
        ],
        GateKind::X | GateKind::Cnot | GateKind::Ccnot => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::Swap => unreachable!("SWAP is not a single-qubit matrix"),
    }
}

/// Single-qubit Paulis used by the noise channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Statevector {
    /// Applies `gate` in place. `theta` must be present exactly for rotations.
    pub fn apply(&mut self, gate: &GateOp, theta: Option<f64>) -> Result<()> {
        gate.validate(self.n_qubits())?;
        match (gate.kind.is_rotation(), theta) {
            (true, None) => {
                return Err(Error::invalid(format!("{} requires an angle", gate.kind)))
            }
            (false, Some(_)) => {
                return Err(Error::invalid(format!("{} takes no angle", gate.kind)))
            }
            _ => {}
        }
        self.apply_unchecked(gate, theta.unwrap_or(0.0));
        Ok(())
    }

    /// Applies a gate that has already been validated for this register.
    pub(crate) fn apply_unchecked(&mut self, gate: &GateOp, theta: f64) {
        let (cmask, cval) = self.control_pattern(&gate.controls);
        match gate.kind {
            GateKind::Swap => {
                let a = self.mask(gate.target);
                let b = self.mask(gate.partner.expect("validated SWAP"));
                swap_kernel(self.amps_mut(), a, b, cmask, cval);
            }
            GateKind::X | GateKind::Cnot | GateKind::Ccnot => {
                let t = self.mask(gate.target);
                x_kernel(self.amps_mut(), t, cmask, cval);
            }
            kind => {
                let t = self.mask(gate.target);
                let m = matrix(kind, theta);
                single_kernel(self.amps_mut(), t, &m, cmask, cval);
            }
        }
    }

    pub(crate) fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let t = self.mask(qubit);
        let amps = self.amps_mut();
        match pauli {
            Pauli::X => x_kernel(amps, t, 0, 0),
            Pauli::Y => {
                let m = [[ZERO, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), ZERO]];
                single_kernel(amps, t, &m, 0, 0);
            }
            Pauli::Z => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & t != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    fn control_pattern(&self, controls: &[Control]) -> (usize, usize) {
        controls.iter().fold((0, 0), |(mask, val), c| {
            let m = self.mask(c.qubit);
            (mask | m, if c.polarity { val | m } else { val })
        })
    }
}

fn single_kernel(amps: &mut [Complex64], t: usize, m: &Mat2, cmask: usize, cval: usize) {
    for i in 0..amps.len() {
        if i & t != 0 || i & cmask != cval {
            continue;
        }
        let j = i | t;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[j] = m[1][0] * a + m[1][1] * b;
    }
}

fn x_kernel(amps: &mut [Complex64], t: usize, cmask: usize, cval: usize) {
    for i in 0..amps.len() {
        if i & t == 0 && i & cmask == cval {
            amps.swap(i, i | t);
        }
    }
}

fn swap_kernel(amps: &mut [Complex64], a: usize, b: usize, cmask: usize, cval: usize) {
    for i in 0..amps.len() {
        if i & a != 0 && i & b == 0 && i & cmask == cval {
            amps.swap(i, i ^ a ^ b);
        }
    }
}

/// Functional form of [`Statevector::apply`].
pub fn apply_gate(state: &Statevector, gate: &GateOp, theta: Option<f64>) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate, theta)?;
    Ok(out)
}
