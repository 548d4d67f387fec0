use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::rng::SimRng;

/// Parameter-shift gradient over the `active` slots (all others get 0).
///
/// `loss(params, seed)` must be an affine function of an observable
/// expectation, and every slot must feed exactly one `exp(-i theta P / 2)`
/// rotation. A rotation with controls satisfies this only when the control
/// register is in a basis state, as it is for a fixed asset label.
/// Evaluation `j` receives seed `seed + j`; evaluations run in parallel and
/// are reduced in slot order.
pub fn grad_parameter_shift<F>(params: &[f64], active: &[usize], loss: F, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], u64) -> Result<f64> + Sync,
{
    let diffs: Vec<Result<(usize, f64)>> = active
        .par_iter()
        .enumerate()
        .map(|(j, &i)| {
            let mut shifted = params.to_vec();
            shifted[i] = params[i] + FRAC_PI_2;
            let plus = loss(&shifted, seed.wrapping_add(2 * j as u64))?;
            shifted[i] = params[i] - FRAC_PI_2;
            let minus = loss(&shifted, seed.wrapping_add(2 * j as u64 + 1))?;
            Ok((i, 0.5 * (plus - minus)))
        })
        .collect();
    let mut grad = vec![0.0; params.len()];
    for d in diffs {
        let (i, g) = d?;
        grad[i] = g;
    }
    Ok(grad)
}

/// One SPSA estimate: a random sign vector on the `active` slots, two loss
/// evaluations at `theta +/- delta * alpha`.
pub fn grad_spsa<F>(params: &[f64], active: &[usize], delta: f64, loss: F, rng: &mut SimRng) -> Result<Vec<f64>>
where
    F: Fn(&[f64], u64) -> Result<f64>,
{
    let mut alpha = vec![0.0; params.len()];
    for &i in active {
        alpha[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let seeds = (rng.random(), rng.random());
    grad_spsa_with_alpha(params, &alpha, delta, loss, seeds)
}

/// SPSA estimate for a given perturbation `alpha` (entries in `{-1, 0, +1}`;
/// zero entries are left out of the perturbation and get gradient 0).
pub fn grad_spsa_with_alpha<F>(params: &[f64], alpha: &[f64], delta: f64, loss: F, seeds: (u64, u64)) -> Result<Vec<f64>>
where
    F: Fn(&[f64], u64) -> Result<f64>,
{
    let shifted = |sign: f64| -> Vec<f64> {
        params
            .iter()
            .zip(alpha)
            .map(|(p, a)| p + sign * delta * a)
            .collect()
    };
    let plus = loss(&shifted(1.0), seeds.0)?;
    let minus = loss(&shifted(-1.0), seeds.1)?;
    let diff = (plus - minus) / (2.0 * delta);
    Ok(alpha
        .iter()
        .map(|&a| if a == 0.0 { 0.0 } else { diff / a })
        .collect())
}
