mod common;

use common::{random_params, random_state};
use cqnn::ansatz::{build_layered_pqc, build_loader_circuit, build_share_specify, prepare_label, Entangler, LabelMode, ShareSpecifySpec};
use cqnn::circuit::{BlockTag, ParamCircuit};
use cqnn::data::EmpiricalDist;
use cqnn::rng::rng_from_seed;
use cqnn::simulator::{apply_circuit, Statevector};
use cqnn::training::{dist_to_amplitudes, fidelity_loss, grad_parameter_shift, grad_spsa, qbgu_step, Example, Objective, TrainConfig};
use rand::Rng;

fn spec(k: usize, mode: LabelMode) -> ShareSpecifySpec {
    ShareSpecifySpec { label_mode: mode, ..ShareSpecifySpec::new(2, 1, k, 2, 2) }
}

fn max_diff(a: &Statevector, b: &Statevector) -> f64 {
    a.amps().iter().zip(b.amps()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn fixed_label_reduces_to_plain_circuit() {
    let mut rng = rng_from_seed(1);
    for mode in [LabelMode::Direct, LabelMode::Toffoli] {
        for k_total in [2, 4, 8] {
            let s = spec(k_total, mode);
            let full = build_share_specify(&s).unwrap();
            let params = random_params(full.n_params(), &mut rng);
            let lw = s.label_width();
            for k in 0..k_total {
                let (reduced, slot_map) = full.reduced_for_label(k, lw).unwrap();
                let data = random_state(s.data_qubits(), &mut rng);
                let label = Statevector::basis(lw, k << 1).unwrap();
                let rp: Vec<f64> = slot_map.iter().map(|&i| params[i]).collect();
                let got = apply_circuit(&data.tensor(&label).unwrap(), &full, &params).unwrap();
                let want = apply_circuit(&data, &reduced, &rp).unwrap().tensor(&label).unwrap();
                assert!(max_diff(&got, &want) <= 1e-10);

                let target = random_state(s.data_qubits(), &mut rng);
                let full_in = data.tensor(&label).unwrap();
                let full_target = target.tensor(&label).unwrap();
                let gf = grad_parameter_shift(
                    &params,
                    &(0..params.len()).collect::<Vec<_>>(),
                    |p, _| fidelity_loss(&apply_circuit(&full_in, &full, p)?, &full_target),
                    0,
                )
                .unwrap();
                let gr = grad_parameter_shift(
                    &rp,
                    &(0..rp.len()).collect::<Vec<_>>(),
                    |p, _| fidelity_loss(&apply_circuit(&data, &reduced, p)?, &target),
                    0,
                )
                .unwrap();
                for (j, &i) in slot_map.iter().enumerate() {
                    assert!((gf[i] - gr[j]).abs() <= 1e-10);
                }
                for (i, g) in gf.iter().enumerate() {
                    if !slot_map.contains(&i) {
                        assert!(g.abs() <= 1e-10, "slot {i} of another asset moved");
                    }
                }
            }
        }
    }
}

#[test]
fn specific_blocks_ignore_other_labels() {
    let s = spec(4, LabelMode::Direct);
    let c = build_share_specify(&s).unwrap();
    let mut rng = rng_from_seed(2);
    let shared = c.param_slots_with(|t| t == BlockTag::Shared);
    let mut params = vec![0.0; c.n_params()];
    for i in c.param_slots_with(|t| t == BlockTag::Specific(2)) {
        params[i] = rng.random_range(-3.0..3.0);
    }
    assert!(shared.iter().all(|&i| params[i] == 0.0));
    let no_entangler = ShareSpecifySpec { entangler: Entangler::Identity, ..s.clone() };
    let c = build_share_specify(&no_entangler).unwrap();
    let data = random_state(s.data_qubits(), &mut rng);
    for k in [0, 1, 3] {
        let input = data.tensor(&Statevector::basis(s.label_width(), k << 1).unwrap()).unwrap();
        let out = apply_circuit(&input, &c, &params).unwrap();
        assert!(max_diff(&out, &input) <= 1e-12);
    }
}

#[test]
fn parameter_counts_follow_layers_qubits_sublayers() {
    for (n, l, c) in [(1, 1, 1), (3, 2, 2), (4, 4, 2), (5, 3, 3)] {
        assert_eq!(build_layered_pqc(n, l, c, Entangler::Ring).unwrap().n_params(), n * l * c);
    }
    assert_eq!(build_loader_circuit(3, 4).unwrap().n_params(), 24);
    let s = ShareSpecifySpec::new(3, 1, 2, 1, 2);
    let c = build_share_specify(&s).unwrap();
    assert_eq!(c.param_slots_with(|t| t == BlockTag::Shared).len(), 8);
    assert_eq!(c.param_slots_with(|t| t == BlockTag::Specific(1)).len(), 8);
    assert_eq!(s.params_per_asset(), 16);
    let s8 = ShareSpecifySpec::new(3, 1, 8, 1, 2);
    let c8 = build_share_specify(&s8).unwrap();
    assert_eq!(c8.param_slots_with(|t| t == BlockTag::Shared).len(), 8);
}

#[test]
fn zero_angles_are_identity() {
    let mut rng = rng_from_seed(3);
    let loader = build_layered_pqc(3, 2, 2, Entangler::Identity).unwrap();
    let s = random_state(3, &mut rng);
    assert!(max_diff(&apply_circuit(&s, &loader, &vec![0.0; loader.n_params()]).unwrap(), &s) <= 1e-12);
    let sp = ShareSpecifySpec { entangler: Entangler::Identity, ..ShareSpecifySpec::new(2, 1, 2, 2, 2) };
    let c = build_share_specify(&sp).unwrap();
    for k in 0..2 {
        let input = random_state(3, &mut rng).tensor(&Statevector::basis(2, k << 1).unwrap()).unwrap();
        assert!(max_diff(&apply_circuit(&input, &c, &vec![0.0; c.n_params()]).unwrap(), &input) <= 1e-12);
    }
}

#[test]
fn portfolio_label_state_carries_weights() {
    let s = prepare_label(&[3.0, 1.0]).unwrap();
    let p = s.probabilities();
    assert!((p[0b00] - 0.75).abs() < 1e-12 && (p[0b10] - 0.25).abs() < 1e-12);
}

fn batch_state(ctx: &EmpiricalDist, extra: usize) -> Statevector {
    dist_to_amplitudes(ctx, ctx.width()).unwrap().tensor(&Statevector::zero(extra).unwrap()).unwrap()
}

#[test]
fn batch_forward_is_weighted_sum_of_per_context_passes() {
    let mut rng = rng_from_seed(4);
    let c: ParamCircuit = build_layered_pqc(4, 4, 2, Entangler::Ring).unwrap();
    let params = random_params(c.n_params(), &mut rng);
    let weights: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
    let ctx = EmpiricalDist::from_weights(3, weights).unwrap();
    let batch = apply_circuit(&batch_state(&ctx, 1), &c, &params).unwrap();
    let mut sum = vec![num_complex::Complex64::new(0.0, 0.0); 16];
    for x in 0..8 {
        let out = apply_circuit(&Statevector::basis(4, x << 1).unwrap(), &c, &params).unwrap();
        for (s, a) in sum.iter_mut().zip(out.amps()) {
            *s += ctx.prob(x).sqrt() * a;
        }
    }
    let err = batch.amps().iter().zip(&sum).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn delta_context_step_equals_single_example_step() {
    let c = build_layered_pqc(4, 4, 2, Entangler::Ring).unwrap();
    let mut rng = rng_from_seed(5);
    let params = random_params(c.n_params(), &mut rng);
    let x = 0b101;
    let ctx = EmpiricalDist::delta(3, x).unwrap();
    let cond = [0.3f64, 0.7];
    let joint = EmpiricalDist::from_dense(4, (0..16).map(|i| if i >> 1 == x { cond[i & 1] } else { 0.0 }).collect()).unwrap();
    let joint_target = dist_to_amplitudes(&joint, 4).unwrap();
    let cfg = TrainConfig::default().exact();
    let ctx_state = dist_to_amplitudes(&ctx, 3).unwrap();
    let (batch, batch_loss) = qbgu_step(&c, &params, &ctx_state, &joint_target, &cfg, &mut rng_from_seed(9)).unwrap();

    // Single example |x>|0> -> |x> (sqrt(0.3)|0> + sqrt(0.7)|1>), one SPSA step.
    let target = Statevector::basis(3, x).unwrap().tensor(&dist_to_amplitudes(&EmpiricalDist::from_dense(1, cond.to_vec()).unwrap(), 1).unwrap()).unwrap();
    let example = Example { input: Statevector::basis(4, x << 1).unwrap(), target };
    let obj = Objective::new(&c, &example, &cfg, 3);
    let mut r = rng_from_seed(9);
    let loss = obj.eval(&params, r.random()).unwrap();
    let all: Vec<usize> = (0..params.len()).collect();
    let g = grad_spsa(&params, &all, cfg.spsa_delta, |p, s| obj.eval(p, s), &mut r).unwrap();
    let single: Vec<f64> = params.iter().zip(&g).map(|(p, g)| p - cfg.learning_rate * g).collect();
    assert_eq!(batch_loss.to_bits(), loss.to_bits());
    assert!(batch.iter().zip(&single).all(|(a, b)| a.to_bits() == b.to_bits()));
}
