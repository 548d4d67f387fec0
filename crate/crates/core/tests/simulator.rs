mod common;

use common::{circuit_matrix, gate_matrix, matvec, random_circuit, random_params, random_state};
use cqnn::circuit::{BlockTag, ParamCircuit, PlacedGate};
use cqnn::rng::rng_from_seed;
use cqnn::simulator::{
    apply_circuit, fidelity, marginal_probs, sample_bitstrings, swap_test_estimate, swap_test_p0, Control, GateOp,
    Statevector,
};
use num_complex::Complex64;

fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn every_gate_kind_matches_dense_oracle() {
    let mut rng = rng_from_seed(11);
    let ops = [
        GateOp::rx(1, 0),
        GateOp::ry(0, 0),
        GateOp::rz(2, 0),
        GateOp::ry(2, 0).with_control(Control::off(0)),
        GateOp::x(2),
        GateOp::h(1),
        GateOp::cnot(2, 0),
        GateOp::cnot(0, 1).with_control(Control::off(2)),
        GateOp::ccnot(0, 2, 1),
        GateOp::swap(0, 2),
        GateOp::swap(1, 2).with_control(Control::on(0)),
    ];
    for op in ops {
        let state = random_state(3, &mut rng);
        let theta = 0.83;
        let mut got = state.clone();
        got.apply(&op, op.param_slot.map(|_| theta)).unwrap();
        let want = matvec(&gate_matrix(3, &op, theta), state.amps());
        assert!(max_err(got.amps(), &want) < 1e-12, "{op:?}");
    }
}

#[test]
fn random_circuits_match_dense_oracle() {
    let mut rng = rng_from_seed(3);
    for i in 0..200 {
        let n = 1 + i % 4;
        let c = random_circuit(n, 12, true, &mut rng);
        let p = random_params(c.n_params(), &mut rng);
        let s = random_state(n, &mut rng);
        let got = apply_circuit(&s, &c, &p).unwrap();
        let want = matvec(&circuit_matrix(&c, &p), s.amps());
        assert!(max_err(got.amps(), &want) <= 1e-10);
        assert!((got.norm_sqr() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn qubit_zero_is_most_significant() {
    let mut s = Statevector::zero(3).unwrap();
    s.apply(&GateOp::x(0), None).unwrap();
    assert_eq!(s.probabilities()[0b100], 1.0);
}

#[test]
fn circuits_preserve_fidelity() {
    let mut rng = rng_from_seed(8);
    let c = random_circuit(4, 30, true, &mut rng);
    let p = random_params(c.n_params(), &mut rng);
    let (a, b) = (random_state(4, &mut rng), random_state(4, &mut rng));
    let before = fidelity(&a, &b).unwrap();
    let after = fidelity(&apply_circuit(&a, &c, &p).unwrap(), &apply_circuit(&b, &c, &p).unwrap()).unwrap();
    assert!((before - after).abs() <= 1e-10);
}

#[test]
fn swap_test_estimate_within_three_sigma() {
    let mut rng = rng_from_seed(21);
    for seed in 0..5 {
        let (a, b) = (random_state(2, &mut rng), random_state(2, &mut rng));
        let f = fidelity(&a, &b).unwrap();
        let p0 = (1.0 + f) / 2.0;
        assert!((swap_test_p0(&a, &b).unwrap() - p0).abs() < 1e-12);
        let shots = 100_000u64;
        let est = swap_test_estimate(&a, &b, shots, seed).unwrap();
        let sigma = (p0 * (1.0 - p0) / shots as f64).sqrt();
        assert!((est - p0).abs() <= 3.0 * sigma, "est {est} p0 {p0}");
    }
}

#[test]
fn marginal_is_partial_trace_diagonal() {
    let mut rng = rng_from_seed(4);
    let s = random_state(4, &mut rng);
    let m = marginal_probs(&s, &[3, 1]).unwrap();
    let mut want = [0.0; 4];
    for (i, a) in s.amps().iter().enumerate() {
        let q3 = i & 1;
        let q1 = (i >> 2) & 1;
        want[q3 << 1 | q1] += a.norm_sqr();
    }
    for (k, w) in want.iter().enumerate() {
        assert!((m.prob(k) - w).abs() < 1e-14);
    }
}

#[test]
fn sampling_is_seeded() {
    let mut rng = rng_from_seed(9);
    let s = random_state(3, &mut rng);
    let a = sample_bitstrings(&s, &[0, 2], 5000, 77).unwrap();
    let b = sample_bitstrings(&s, &[0, 2], 5000, 77).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total(), 5000);
}

#[test]
fn rejects_malformed_gates() {
    assert!(GateOp::cnot(1, 1).validate(2).is_err());
    assert!(GateOp::x(3).validate(3).is_err());
    let twice = vec![
        PlacedGate { op: GateOp::ry(0, 0), layer: 1, block_tag: BlockTag::Shared },
        PlacedGate { op: GateOp::ry(1, 0), layer: 1, block_tag: BlockTag::Shared },
    ];
    assert!(ParamCircuit::new(2, 1, twice).is_err());
}
