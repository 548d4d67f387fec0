mod common;

use common::bundled;
use cqnn::ansatz::ShareSpecifySpec;
use cqnn::circuit::{BlockTag, ParamCircuit, PlacedGate};
use cqnn::data::{ingest_csv, EmpiricalDist, PipelineConfig};
use cqnn::simulator::{apply_circuit, Control, GateOp, Statevector};
use cqnn::training::{dist_to_amplitudes, train_distribution_loader, train_qmtl, train_qstl, Model, TrainConfig};

fn best_so_far(curve: &[f64]) -> Vec<f64> {
    curve
        .iter()
        .scan(f64::INFINITY, |b, &x| {
            *b = b.min(x);
            Some(*b)
        })
        .collect()
}

#[test]
fn loss_falls_in_trend_on_sample_data() {
    let asset = bundled("sample_prices.csv", &PipelineConfig::default());
    for r in [
        train_distribution_loader(&asset.context_dist(), 4, &TrainConfig::default()).unwrap(),
        train_qstl(&asset, 4, &TrainConfig::default()).unwrap(),
    ] {
        let best = best_so_far(&r.loss_curve);
        let means: Vec<f64> = r.loss_curve.chunks(500).map(|w| w.iter().sum::<f64>() / w.len() as f64).collect();
        // Three standard errors of a 500-epoch mean of swap-test estimates.
        let allowance = 3.0 * 0.5 / (r.config.shots as f64 * 500.0).sqrt();
        for w in means.windows(2) {
            assert!(w[1] <= w[0] + allowance, "window means {means:?}");
        }
        assert!(best[best.len() - 1] < 0.1 * best[0]);
    }
}

#[test]
fn ancilla_only_circuit_overlap_decomposes_per_context() {
    // Context qubits only ever act as controls.
    let gates = vec![
        PlacedGate { op: GateOp::ry(3, 0).with_control(Control::on(0)), layer: 1, block_tag: BlockTag::Shared },
        PlacedGate { op: GateOp::ry(3, 1).with_control(Control::off(1)), layer: 1, block_tag: BlockTag::Shared },
        PlacedGate { op: GateOp::ry(3, 2).with_control(Control::on(2)), layer: 1, block_tag: BlockTag::Shared },
    ];
    let c = ParamCircuit::new(4, 3, gates).unwrap();
    let params = [0.7, -1.2, 2.1];
    let joint = EmpiricalDist::from_weights(4, (1..=16).map(|i| (i * 7 % 11 + 1) as f64).collect()).unwrap();
    let ctx = joint.marginal(&[0, 1, 2]).unwrap();
    let input = dist_to_amplitudes(&ctx, 3).unwrap().tensor(&Statevector::zero(1).unwrap()).unwrap();
    let out = apply_circuit(&input, &c, &params).unwrap();
    let target = dist_to_amplitudes(&joint, 4).unwrap();
    let batch = target.inner(&out).unwrap();

    let mut sum = 0.0;
    for x in 0..8usize {
        let p = ctx.prob(x);
        let pred = apply_circuit(&Statevector::basis(4, x << 1).unwrap(), &c, &params).unwrap();
        let cond: Vec<f64> = (0..2).map(|y| joint.prob(x << 1 | y) / p).collect();
        let term: f64 = (0..2).map(|y| cond[y].sqrt() * pred.amps()[x << 1 | y].re).sum();
        assert!(pred.amps()[x << 1].im.abs() < 1e-15);
        sum += p * term;
    }
    assert!(batch.im.abs() < 1e-12);
    assert!((batch.re - sum).abs() < 1e-12);
}

#[test]
fn model_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let asset = bundled("rule_prices.csv", &PipelineConfig { window: 1, ..PipelineConfig::default() });
    let cfg = TrainConfig { epochs: 50, ..TrainConfig::default() };
    let r = train_qstl(&asset, 2, &cfg).unwrap();
    let m = Model::from_report(&r, vec![asset]).unwrap();
    let path = dir.path().join("model.json");
    m.save(&path).unwrap();
    let back = Model::load(&path).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.circuit().unwrap().hash(), r.circuit_hash);
}

#[test]
fn qmtl_rejects_wrong_asset_count() {
    let a = bundled("pair_a.csv", &PipelineConfig::default());
    let e = train_qmtl(&[a], &ShareSpecifySpec::new(3, 1, 2, 1, 2), &TrainConfig::default()).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn held_out_split_uses_training_quantizer() {
    let cfg = PipelineConfig::default();
    let series = ingest_csv(common::data_path("sample_prices.csv")).unwrap();
    let train = bundled("sample_prices.csv", &cfg);
    let test = train.held_out(&series, &cfg).unwrap();
    assert_eq!(test.quantizer, train.quantizer);
    assert_eq!(test.joint.width(), train.joint.width());
    assert_ne!(test.joint, train.joint);
}
