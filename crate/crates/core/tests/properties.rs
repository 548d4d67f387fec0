mod common;

use common::{random_circuit, random_params, random_state};
use cqnn::ansatz::{build_share_specify, ShareSpecifySpec};
use cqnn::cli::RunConfig;
use cqnn::data::{conditional_slice, empirical_dist, fit_quantizer, quantize, EmpiricalDist, QuantMode, SymbolSeries};
use cqnn::inference::{context_preservation_score, kl_divergence, portfolio_rollout, predict_conditional, RolloutMode};
use cqnn::noise::{apply_readout_error, complement, noisy_execute, NoiseModel};
use cqnn::rng::rng_from_seed;
use cqnn::simulator::{apply_circuit, sample_bitstrings, QubitLayout, Statevector};
use proptest::prelude::*;

fn dist_strategy(width: usize) -> impl Strategy<Value = EmpiricalDist> {
    prop::collection::vec(0.0f64..1.0, 1usize << width)
        .prop_filter("needs mass", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(move |w| EmpiricalDist::from_weights(width, w).unwrap())
}

proptest! {
    #[test]
    fn circuits_preserve_norm(seed in any::<u64>(), n in 1usize..=5, gates in 1usize..40) {
        let mut rng = rng_from_seed(seed);
        let c = random_circuit(n, gates, true, &mut rng);
        let out = apply_circuit(&random_state(n, &mut rng), &c, &random_params(c.n_params(), &mut rng)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_on_self(p in dist_strategy(3), q in dist_strategy(3)) {
        prop_assert!(kl_divergence(&p, &q, 1e-9).unwrap() >= -1e-15);
        prop_assert!(kl_divergence(&p, &p, 1e-9).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn empirical_dists_sum_to_one(symbols in prop::collection::vec(0u8..4, 8..200), window in 1usize..4) {
        let s = SymbolSeries::from_symbols(symbols, 4).unwrap();
        let d = empirical_dist(&s, window).unwrap();
        prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert_eq!(d, empirical_dist(&s, window).unwrap());
    }

    #[test]
    fn quantile_levels_are_balanced(values in prop::collection::btree_set(-100_000i64..100_000, 8..300), log_d in 1u32..=3) {
        let d = 1usize << log_d;
        let returns: Vec<f64> = values.iter().map(|&v| v as f64 / 1000.0).collect();
        prop_assume!(returns.len() >= d);
        let q = fit_quantizer(&returns, d, QuantMode::Quantile).unwrap();
        let s = quantize(&returns, &q);
        let mut counts = vec![0usize; d];
        s.symbols().iter().for_each(|&x| counts[x as usize] += 1);
        let ideal = returns.len() as f64 / d as f64;
        for c in counts {
            prop_assert!((c as f64 - ideal).abs() <= 1.0, "{} vs {}", c, ideal);
        }
    }

    #[test]
    fn conditionals_recompose_joint(joint in dist_strategy(3)) {
        let ctx = joint.marginal(&[0, 1]).unwrap();
        for c in 0..4usize {
            if ctx.prob(c) == 0.0 {
                continue;
            }
            let bits = format!("{c:02b}");
            let cond = conditional_slice(&joint, &bits).unwrap();
            for y in 0..2 {
                prop_assert!((ctx.prob(c) * cond.prob(y) - joint.prob(c << 1 | y)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn config_text_round_trips(epochs in 0usize..100_000, seed in any::<u64>(), lr in 1e-6f64..1.0, window in 1usize..20) {
        let mut c = RunConfig::default();
        c.train.epochs = epochs;
        c.train.seed = seed;
        c.train.learning_rate = lr;
        c.pipeline.window = window;
        prop_assert_eq!(RunConfig::parse_text(&c.to_text()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn portfolio_label_marginal_equals_weights(seed in any::<u64>(), w in prop::collection::vec(0.01f64..10.0, 2)) {
        let spec = ShareSpecifySpec::new(2, 1, 2, 1, 2);
        let c = build_share_specify(&spec).unwrap();
        let params = random_params(c.n_params(), &mut rng_from_seed(seed));
        let contexts = vec!["01".to_string(), "10".to_string()];
        let r = portfolio_rollout(&c, &params, &spec.layout(), &contexts, &w, 2, RolloutMode::Exact { qubit_budget: 20 });
        // Poorly preserving random circuits may be rejected as degenerate.
        if let Ok(r) = r {
            let total: f64 = w.iter().sum();
            let label = r.joint.marginal(&[0]).unwrap();
            for (k, wk) in w.iter().enumerate() {
                prop_assert!((label.prob(k) - wk / total).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn prediction_mass_is_preservation(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let c = random_circuit(4, 20, true, &mut rng);
        let params = random_params(c.n_params(), &mut rng);
        let layout = QubitLayout::model(3, 1, 0);
        for x in 0..8usize {
            let bits = format!("{x:03b}");
            let delta = EmpiricalDist::delta(3, x).unwrap();
            let score = context_preservation_score(&c, &params, &layout, &delta, None).unwrap();
            match predict_conditional(&c, &params, &layout, &bits, None, None) {
                Ok(p) => {
                    prop_assert!((p.next_dist.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                    prop_assert!((p.preservation_score - score).abs() <= 1e-12);
                }
                Err(e) => prop_assert_eq!(e.exit_code(), 5),
            }
        }
    }

    #[test]
    fn noiseless_model_is_plain_sampling(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let c = random_circuit(3, 10, true, &mut rng);
        let params = random_params(c.n_params(), &mut rng);
        let input = Statevector::zero(3).unwrap();
        let noisy = noisy_execute(&c, &params, &input, &[0, 2], &NoiseModel::new(0.0, 0.0), 4000, seed).unwrap();
        let out = apply_circuit(&input, &c, &params).unwrap();
        prop_assert_eq!(noisy, sample_bitstrings(&out, &[0, 2], 4000, seed).unwrap().to_dist().unwrap());
    }

    #[test]
    fn certain_readout_flip_complements_outcomes(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let s = random_state(3, &mut rng);
        let counts = sample_bitstrings(&s, &[0, 1, 2], 1000, seed).unwrap();
        let flipped = apply_readout_error(&counts, 1.0, &mut rng).unwrap();
        for x in 0..8usize {
            let bits = format!("{x:03b}");
            prop_assert_eq!(flipped.get(&complement(&bits).unwrap()), counts.get(&bits));
        }
    }
}
