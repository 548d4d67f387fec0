use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::state::Statevector;
use crate::data::dist::{check_positions, gather_bits, Counts, EmpiricalDist};
use crate::error::Result;
use crate::rng::{rng_from_seed, SimRng};

/// Outcome distribution of measuring the qubits in `keep` (diagonal of the
/// reduced density matrix). Output bit order follows `keep`.
pub fn marginal_probs(state: &Statevector, keep: &[usize]) -> Result<EmpiricalDist> {
    let n = state.n_qubits();
    check_positions(keep, n)?;
    let mut out = vec![0.0; 1 << keep.len()];
    for (i, a) in state.amps().iter().enumerate() {
        let p = a.norm_sqr();
        if p != 0.0 {
            out[gather_bits(i, n, keep)] += p;
        }
    }
    EmpiricalDist::from_weights(keep.len(), out)
}

pub fn sample_bitstrings(
    state: &Statevector,
    measured: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    sample_bitstrings_with(state, measured, shots, &mut rng_from_seed(seed))
}

pub fn sample_bitstrings_with(
    state: &Statevector,
    measured: &[usize],
    shots: u64,
    rng: &mut SimRng,
) -> Result<Counts> {
    let dist = marginal_probs(state, measured)?;
    Ok(sample_dist(&dist, shots, rng))
}

/// Multinomial draw of `shots` outcomes, as a chain of conditional binomials
/// in index order.
pub fn sample_dist(dist: &EmpiricalDist, shots: u64, rng: &mut SimRng) -> Counts {
    let mut counts = Counts::new(dist.width());
    let mut left = shots;
    let mut mass = 1.0;
    for (i, &p) in dist.probs().iter().enumerate() {
        if left == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let q = if mass <= p { 1.0 } else { (p / mass).clamp(0.0, 1.0) };
        let k = if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("q in [0,1]").sample(rng)
        };
        counts.add(i, k);
        left -= k;
        mass -= p;
    }
    if left > 0 {
        // Rounding left a sliver of mass unassigned; give it to the last
        // supported outcome.
        let last = dist.probs().iter().rposition(|p| *p > 0.0).unwrap_or(0);
        counts.add(last, left);
    }
    counts
}

/// Single outcome index drawn from `probs` by inverse CDF.
pub(crate) fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::state::init_basis;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> Statevector {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Statevector::from_amplitudes(vec![h, z, z, h]).unwrap()
    }

    #[test]
    fn marginal_examples() {
        let m = marginal_probs(&bell(), &[1]).unwrap();
        assert!((m.probs()[0] - 0.5).abs() < 1e-15);
        let m = marginal_probs(&init_basis(3, "011").unwrap(), &[0, 2]).unwrap();
        assert_eq!(m.prob_of("01").unwrap(), 1.0);
        assert!(marginal_probs(&bell(), &[]).is_err());
        assert!(marginal_probs(&bell(), &[2]).is_err());
    }

    #[test]
    fn sampling_examples() {
        let one = init_basis(1, "1").unwrap();
        let c = sample_bitstrings(&one, &[0], 100, 1).unwrap();
        assert_eq!(c.get("1"), 100);
        assert_eq!(c.counts.len(), 1);

        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let plus = Statevector::from_amplitudes(vec![h, h]).unwrap();
        let c = sample_bitstrings(&plus, &[0], 100_000, 3).unwrap();
        assert_eq!(c.total(), 100_000);
        let f0 = c.get("0") as f64 / 1e5;
        assert!((f0 - 0.5).abs() <= 0.005, "{f0}");

        let again = sample_bitstrings(&plus, &[0], 100_000, 3).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn sample_index_respects_support() {
        let mut rng = rng_from_seed(0);
        for _ in 0..1000 {
            assert_eq!(sample_index(&[0.0, 1.0, 0.0], &mut rng), 1);
        }
    }
}
