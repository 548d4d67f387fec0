use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense pure state over `n_qubits` qubits.
///
/// Basis index convention: qubit 0 is the most significant bit, so the
/// bitstring `b_0 b_1 ... b_{n-1}` read left to right is the binary
/// expansion of the amplitude index. This matches the top-to-bottom wire
/// order used by every circuit builder in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Largest register the dense engine accepts (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

impl Statevector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector. The length must be a power of two and the
    /// vector must already be normalized to within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = width_of(amps.len())?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "amplitudes are not normalized (squared norm {norm})"
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Wraps and rescales an amplitude vector to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = width_of(amps.len())?;
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_same_width(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|self> (x) |other>`; `self` occupies the leading (more significant) qubits.
    pub fn tensor(&self, other: &Statevector) -> Result<Statevector> {
        check_width(self.n_qubits + other.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Statevector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Debug dump: `[[re, im], ...]` in index order.
    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<AmpPair> = self.amps.iter().map(|a| AmpPair(a.re, a.im)).collect();
        serde_json::to_value(pairs).expect("amplitude pairs serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let pairs: Vec<AmpPair> = serde_json::from_value(value.clone())?;
        Self::from_amplitudes(pairs.into_iter().map(|p| Complex64::new(p.0, p.1)).collect())
    }

    pub(crate) fn check_same_width(&self, other: &Statevector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// Bit mask selecting qubit `q` in a basis index.
    #[inline]
    pub(crate) fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }
}

#[derive(Serialize, Deserialize)]
struct AmpPair(f64, f64);

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "register width {n} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn width_of(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::invalid(format!(
            "amplitude vector length {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Basis state whose binary expansion (qubit 0 first) equals `bits`.
pub fn init_basis(n_qubits: usize, bits: &str) -> Result<Statevector> {
    if bits.len() != n_qubits {
        return Err(Error::invalid(format!(
            "bitstring '{bits}' has length {} but register has {n_qubits} qubits",
            bits.len()
        )));
    }
    let index = parse_bits(bits)?;
    Statevector::basis(n_qubits, index)
}

pub(crate) fn parse_bits(bits: &str) -> Result<usize> {
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::invalid(format!("'{bits}' is not a bitstring"))),
    })
}

pub(crate) fn format_bits(index: usize, width: usize) -> String {
    (0..width)
        .map(|i| if index >> (width - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}
