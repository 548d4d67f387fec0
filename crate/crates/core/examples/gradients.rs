//! Parameter-shift, SPSA and finite-difference gradients of the fidelity
//! loss on a small layered circuit.

use cqnn::ansatz::{build_layered_pqc, Entangler};
use cqnn::rng::rng_from_seed;
use cqnn::simulator::{apply_circuit, Statevector};
use cqnn::training::{fidelity_loss, grad_parameter_shift, grad_spsa};
use rand::Rng;

fn main() -> cqnn::Result<()> {
    let circuit = build_layered_pqc(3, 2, 2, Entangler::Ring)?;
    let mut rng = rng_from_seed(5);
    let params: Vec<f64> = (0..circuit.n_params()).map(|_| rng.random_range(-3.0..3.0)).collect();
    let target = Statevector::basis(3, 0b101)?;
    let loss = |p: &[f64], _seed: u64| fidelity_loss(&apply_circuit(&Statevector::zero(3)?, &circuit, p)?, &target);
    let all: Vec<usize> = (0..params.len()).collect();

    let shift = grad_parameter_shift(&params, &all, loss, 0)?;
    let h = 1e-5;
    let fd: Vec<f64> = all
        .iter()
        .map(|&i| {
            let (mut a, mut b) = (params.clone(), params.clone());
            a[i] += h;
            b[i] -= h;
            Ok((loss(&a, 0)? - loss(&b, 0)?) / (2.0 * h))
        })
        .collect::<cqnn::Result<_>>()?;

    // SPSA is unbiased only on average; average a few hundred estimates.
    let n = 500;
    let mut spsa = vec![0.0; params.len()];
    for _ in 0..n {
        for (s, g) in spsa.iter_mut().zip(grad_spsa(&params, &all, 0.01, loss, &mut rng)?) {
            *s += g / n as f64;
        }
    }

    println!("slot  shift      finite diff  spsa (mean of {n})");
    for i in all {
        println!("{i:4}  {:+.6}  {:+.6}    {:+.4}", shift[i], fd[i], spsa[i]);
    }
    Ok(())
}
