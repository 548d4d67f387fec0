//! Command-line front end. Every command resolves a [`RunConfig`], writes it
//! next to its outputs, and reports errors through [`Error::exit_code`].

mod config;

pub use config::RunConfig;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::ansatz::{build_layered_pqc, build_loader_circuit, build_share_specify};
use crate::circuit::ParamCircuit;
use crate::data::{ingest_csv, AssetData, PriceSeries};
use crate::error::{Error, Result};
use crate::inference::{
    basis_index, basis_model_joint, batch_input, context_preservation_score, output_joint, per_context_kl, portfolio_rollout,
    predict_conditional, sequential_rollout, weighted_conditional_kl, RolloutMode,
};
use crate::io::{to_json_string, write_csv, write_json};
use crate::noise::{noise_sweep, write_sweep_csv, NoiseKind, SweepPoint};
use crate::simulator::state::{format_bits, Statevector};
use crate::training::{scheduled_asset, train_distribution_loader, train_qmtl, train_qstl, Model, ModelArch, TrainReport};

#[derive(Debug, Parser)]
#[command(name = "cqnn", version, about = "Train and query contextual quantum neural networks on price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Preprocess one price CSV and train the context-distribution loader.
    Load {
        prices: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train a single-asset (stl) or multi-asset (mtl) model.
    Train {
        #[arg(value_enum)]
        kind: TrainKind,
        #[arg(required = true)]
        prices: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Next-symbol distribution for one context.
    Predict {
        model: PathBuf,
        #[arg(long)]
        context: String,
        /// Asset id or label index (multi-asset models).
        #[arg(long)]
        asset: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Repeated application of the model on its own predictions.
    Rollout {
        model: PathBuf,
        /// Starting context; for a portfolio, one per label, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        context: Vec<String>,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        asset: Option<String>,
        /// Portfolio weights, one per label; enables portfolio mode.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Sample episodes instead of enumerating paths.
        #[arg(long)]
        sampled: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// KL between noiseless and noisy prediction distributions over a grid
    /// of noise probabilities.
    NoiseSweep {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        kind: SweepKind,
        /// Noise probabilities, ascending; defaults to 0, 0.05, ..., 0.5.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Context to load; defaults to the most frequent training context.
        #[arg(long)]
        context: Option<String>,
        #[arg(long)]
        asset: Option<String>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Gate listing and parameter counts of a model or a default circuit.
    Describe {
        model: Option<PathBuf>,
        /// Circuit family to build from the config when no model is given.
        #[arg(long, value_enum, default_value = "stl")]
        arch: ArchKind,
        /// Number of assets for `--arch mtl`.
        #[arg(long, default_value_t = 2)]
        assets: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Per-asset and per-context KL of a trained model, on its training
    /// joints or on the held-out part of the given price files.
    Eval {
        model: PathBuf,
        prices: Vec<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TrainKind {
    Stl,
    Mtl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Depolarizing,
    Readout,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArchKind {
    Loader,
    Stl,
    Mtl,
}

/// Config file, generic overrides, and the most used keys as flags.
#[derive(Debug, Default, Args)]
pub struct Common {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    spsa_delta: Option<f64>,
    #[arg(long)]
    grad_estimator: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    init: Option<String>,
    /// Context length in symbols.
    #[arg(long = "T", alias = "t")]
    t: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    block_epochs: Option<usize>,
    #[arg(long)]
    trajectories: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags: [(&str, Option<String>); 18] = [
            ("epochs", self.epochs.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("shots", self.shots.map(|v| v.to_string())),
            ("learning_rate", self.learning_rate.map(|v| v.to_string())),
            ("spsa_delta", self.spsa_delta.map(|v| v.to_string())),
            ("grad_estimator", self.grad_estimator.clone()),
            ("loss", self.loss.clone()),
            ("init", self.init.clone()),
            ("t", self.t.map(|v| v.to_string())),
            ("tau", self.tau.map(|v| v.to_string())),
            ("d", self.d.map(|v| v.to_string())),
            ("mode", self.mode.clone()),
            ("window", self.window.map(|v| v.to_string())),
            ("stride", self.stride.map(|v| v.to_string())),
            ("split", self.split.map(|v| v.to_string())),
            ("layers", self.layers.map(|v| v.to_string())),
            ("block_epochs", self.block_epochs.map(|v| v.to_string())),
            ("trajectories", self.trajectories.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        cfg.apply(self.set.iter().map(String::as_str))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` and runs the command, writing the primary result to `out`.
/// Help and version requests are written to `out` as well.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command, out),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => out
                .write_all(e.render().to_string().as_bytes())
                .map_err(|e| Error::io("<stdout>", e)),
            _ => Err(Error::Config(e.render().to_string())),
        },
    }
}

/// Entry point for the binary: exit code 0 on success, otherwise the
/// error's code after printing it to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<()> {
    out.write_all(to_json_string(value)?.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn prepare_dir(dir: &Path, cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    cfg.write(dir)
}

fn load_assets(paths: &[PathBuf], cfg: &RunConfig) -> Result<(Vec<PriceSeries>, Vec<AssetData>)> {
    let series = paths.iter().map(ingest_csv).collect::<Result<Vec<_>>>()?;
    let assets = series
        .iter()
        .map(|s| AssetData::from_prices(s, &cfg.pipeline))
        .collect::<Result<Vec<_>>>()?;
    Ok((series, assets))
}

fn write_loss_curve(path: &Path, report: &TrainReport, names: &[String]) -> Result<()> {
    let block = report.config.block_epochs;
    let rows = report.loss_curve.iter().enumerate().map(|(e, l)| {
        let asset = &names[if names.len() > 1 { scheduled_asset(e, block, names.len()) } else { 0 }];
        [e.to_string(), asset.clone(), l.to_string()]
    });
    write_csv(path, &["epoch", "asset", "loss"], rows)
}

fn summary(report: &TrainReport) -> serde_json::Value {
    json!({
        "arch": report.arch,
        "epochs_run": report.epochs_run,
        "final_loss": report.loss_curve.last(),
        "kl_per_asset": report.kl_per_asset,
        "kl_basis_per_asset": report.kl_basis_per_asset,
        "final_fidelity": report.final_fidelity,
        "preservation_per_asset": report.preservation_per_asset,
        "circuit_hash": report.circuit_hash,
    })
}

fn label_for(model: &Model, asset: Option<&str>) -> Result<Option<usize>> {
    match (model.arch.label_width(), asset) {
        (0, None) => Ok(None),
        (0, Some(a)) => {
            model.asset_index(a)?;
            Ok(None)
        }
        (_, Some(a)) => Ok(Some(model.asset_index(a)?)),
        (_, None) => Err(Error::Config("multi-asset model needs --asset".into())),
    }
}

fn predictive(model: &Model) -> Result<()> {
    if let ModelArch::Loader { .. } = model.arch {
        return Err(Error::Config("a loader model has no prediction register".into()));
    }
    Ok(())
}

fn gate_line(i: usize, g: &crate::circuit::PlacedGate) -> String {
    let op = &g.op;
    let mut s = format!("{i:4}  L{}  {:<6} q{}", g.layer, op.kind.to_string(), op.target);
    if let Some(p) = op.partner {
        s += &format!(",q{p}");
    }
    for c in &op.controls {
        s += &format!("  ctrl q{}={}", c.qubit, u8::from(c.polarity));
    }
    if let Some(slot) = op.param_slot {
        s += &format!("  theta[{slot}]");
    }
    s += &format!("  {}", serde_json::to_value(g.block_tag).map(|v| v.to_string()).unwrap_or_default());
    s
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Load { prices, out_dir, common } => {
            let cfg = common.resolve()?;
            let (_, assets) = load_assets(std::slice::from_ref(&prices), &cfg)?;
            let asset = &assets[0];
            let ctx = asset.context_dist();
            let report = train_distribution_loader(&ctx, cfg.layers, &cfg.train)?;
            prepare_dir(&out_dir, &cfg)?;
            write_json(out_dir.join("distribution.json"), &asset.to_json())?;
            write_json(out_dir.join("report.json"), &report)?;
            write_loss_curve(&out_dir.join("loss_curve.csv"), &report, std::slice::from_ref(&asset.asset_id))?;
            let s = json!({
                "asset_id": asset.asset_id,
                "qubits": ctx.width(),
                "epochs_run": report.epochs_run,
                "final_fidelity": report.final_fidelity["target"],
                "kl": report.kl_per_asset["target"],
                "circuit_hash": report.circuit_hash,
            });
            write_json(out_dir.join("summary.json"), &s)?;
            emit(out, &s)
        }
        Command::Train { kind, prices, out_dir, common } => {
            let cfg = common.resolve()?;
            let (_, assets) = load_assets(&prices, &cfg)?;
            let report = match kind {
                TrainKind::Stl => {
                    if assets.len() != 1 {
                        return Err(Error::Config(format!(
                            "stl trains one asset, {} given",
                            assets.len()
                        )));
                    }
                    train_qstl(&assets[0], cfg.layers, &cfg.train)?
                }
                TrainKind::Mtl => train_qmtl(&assets, &cfg.mtl_spec(assets.len()), &cfg.train)
                    .map_err(|e| match e {
                        Error::InvalidArgument(m) => Error::Config(m),
                        e => e,
                    })?,
            };
            let model = Model::from_report(&report, assets.clone())?.with_pipeline(cfg.pipeline.clone());
            prepare_dir(&out_dir, &cfg)?;
            model.save(out_dir.join("model.json"))?;
            write_json(out_dir.join("report.json"), &report)?;
            let names: Vec<String> = assets.iter().map(|a| a.asset_id.clone()).collect();
            write_loss_curve(&out_dir.join("loss_curve.csv"), &report, &names)?;
            let s = summary(&report);
            write_json(out_dir.join("summary.json"), &s)?;
            emit(out, &s)
        }
        Command::Predict { model, context, asset, out_dir, common } => {
            let cfg = common.resolve()?;
            let model = Model::load(model)?;
            predictive(&model)?;
            let label = label_for(&model, asset.as_deref())?;
            let quantizer = model.assets.get(label.unwrap_or(0)).and_then(|a| a.quantizer.as_ref());
            let p = predict_conditional(&model.circuit()?, &model.params, &model.layout(), &context, label, quantizer)?;
            let value = json!({
                "context": p.context,
                "label": p.label,
                "next_dist": p.next_dist.to_map(),
                "expected_movement": p.expected_movement,
                "preservation_score": p.preservation_score,
            });
            if let Some(dir) = out_dir {
                prepare_dir(&dir, &cfg)?;
                write_json(dir.join("prediction.json"), &value)?;
            }
            emit(out, &value)
        }
        Command::Rollout { model, context, steps, asset, weights, sampled, out_dir, common } => {
            let cfg = common.resolve()?;
            let model = Model::load(model)?;
            predictive(&model)?;
            let circuit = model.circuit()?;
            let layout = model.layout();
            let mode = if sampled {
                RolloutMode::Sampled {
                    episodes: cfg.episodes,
                    seed: cfg.train.seed,
                }
            } else {
                RolloutMode::Exact {
                    qubit_budget: cfg.qubit_budget,
                }
            };
            let value = match weights {
                Some(w) => {
                    let r = portfolio_rollout(&circuit, &model.params, &layout, &context, &w, steps, mode)?;
                    json!({
                        "steps": steps,
                        "mode": mode,
                        "weights": r.weights,
                        "paths": r.paths.iter().map(|p| p.as_ref().map(|d| d.to_map())).collect::<Vec<_>>(),
                        "joint": r.joint.to_map(),
                    })
                }
                None => {
                    if context.len() != 1 {
                        return Err(Error::Config("single-asset rollout takes one context; pass --weights for a portfolio".into()));
                    }
                    let label = label_for(&model, asset.as_deref())?;
                    let d = sequential_rollout(&circuit, &model.params, &layout, &context[0], label, steps, mode)?;
                    json!({
                        "context": context[0],
                        "label": label,
                        "steps": steps,
                        "mode": mode,
                        "paths": d.to_map(),
                    })
                }
            };
            if let Some(dir) = out_dir {
                prepare_dir(&dir, &cfg)?;
                write_json(dir.join("rollout.json"), &value)?;
            }
            emit(out, &value)
        }
        Command::NoiseSweep { model, kind, grid, context, asset, out_dir, common } => {
            let cfg = common.resolve()?;
            let model = Model::load(model)?;
            predictive(&model)?;
            let circuit = model.circuit()?;
            let layout = model.layout();
            let label = label_for(&model, asset.as_deref())?;
            let ctx = match context {
                Some(c) => crate::simulator::state::parse_bits(&c)?,
                None => most_frequent_context(&model, label)?,
            };
            let input = Statevector::basis(layout.model_width(), basis_index(&layout, ctx, label)?)?;
            let measured: Vec<usize> = layout.prediction.clone().collect();
            let grid = grid.unwrap_or_else(|| (0..=10).map(|i| i as f64 / 20.0).collect());
            let kinds = match kind {
                SweepKind::Depolarizing => vec![NoiseKind::Depolarizing],
                SweepKind::Readout => vec![NoiseKind::Readout],
                SweepKind::Both => vec![NoiseKind::Depolarizing, NoiseKind::Readout],
            };
            let mut points: Vec<SweepPoint> = Vec::new();
            for k in kinds {
                points.extend(noise_sweep(
                    &circuit,
                    &model.params,
                    &input,
                    &measured,
                    &grid,
                    k,
                    cfg.noise_shots,
                    cfg.trajectories,
                    cfg.train.seed,
                )?);
            }
            prepare_dir(&out_dir, &cfg)?;
            write_sweep_csv(out_dir.join("sweep.csv"), &points)?;
            let value = json!({
                "context": format_bits(ctx, layout.context.len()),
                "label": label,
                "shots": cfg.noise_shots,
                "trajectories": cfg.trajectories,
                "points": points,
            });
            write_json(out_dir.join("sweep.json"), &value)?;
            emit(out, &value)
        }
        Command::Describe { model, arch, assets, json: as_json, common } => {
            let cfg = common.resolve()?;
            let (kind, circuit, per_asset): (String, ParamCircuit, usize) = match model {
                Some(p) => {
                    let m = Model::load(p)?;
                    let c = m.circuit()?;
                    let per = match &m.arch {
                        ModelArch::Qmtl { spec } => spec.params_per_asset(),
                        _ => c.n_params(),
                    };
                    (arch_name(&m.arch).into(), c, per)
                }
                None => {
                    let p = &cfg.pipeline;
                    let bits = p.d.trailing_zeros() as usize;
                    match arch {
                        ArchKind::Loader => {
                            let c = build_loader_circuit(p.t * bits, cfg.layers)?;
                            let n = c.n_params();
                            ("loader".into(), c, n)
                        }
                        ArchKind::Stl => {
                            let c = build_layered_pqc((p.t + p.tau) * bits, cfg.layers, cfg.train.sublayers, cfg.train.entangler)?;
                            let n = c.n_params();
                            ("stl".into(), c, n)
                        }
                        ArchKind::Mtl => {
                            let spec = cfg.mtl_spec(assets);
                            let c = build_share_specify(&spec).map_err(|e| Error::Config(e.to_string()))?;
                            ("mtl".into(), c, spec.params_per_asset())
                        }
                    }
                }
            };
            let n_params = circuit.n_params();
            if as_json {
                let mut v = circuit.describe();
                v["kind"] = json!(kind);
                v["params_per_asset"] = json!(per_asset);
                v["circuit_hash"] = json!(circuit.hash());
                return emit(out, &v);
            }
            let mut text = format!(
                "{kind} circuit: {} qubits, {} gates, {n_params} parameters ({per_asset} per asset)\n",
                circuit.n_qubits(),
                circuit.gates().len()
            );
            for (i, g) in circuit.gates().iter().enumerate() {
                text += &gate_line(i, g);
                text.push('\n');
            }
            out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
        }
        Command::Eval { model, prices, out_dir, common } => {
            let cfg = common.resolve()?;
            let model = Model::load(model)?;
            predictive(&model)?;
            let circuit = model.circuit()?;
            let layout = model.layout();
            let (split, targets) = if prices.is_empty() {
                ("train", model.assets.clone())
            } else {
                if prices.len() != model.assets.len() {
                    return Err(Error::Config(format!(
                        "model has {} assets, {} price files given",
                        model.assets.len(),
                        prices.len()
                    )));
                }
                let pipeline = model.pipeline.clone().unwrap_or_else(|| cfg.pipeline.clone());
                let held = model
                    .assets
                    .iter()
                    .zip(&prices)
                    .map(|(a, p)| a.held_out(&ingest_csv(p)?, &pipeline))
                    .collect::<Result<Vec<_>>>()?;
                ("test", held)
            };
            let labelled = model.arch.label_width() > 0;
            let mut per_asset = BTreeMap::new();
            let mut rows = Vec::new();
            for (k, a) in targets.iter().enumerate() {
                let label = labelled.then_some(k);
                let ctx = a.context_dist();
                let batch = output_joint(&circuit, &model.params, &layout, &batch_input(&layout, &ctx, label)?)?;
                let basis = basis_model_joint(&circuit, &model.params, &layout, &ctx, label)?;
                let contexts = per_context_kl(&a.joint, &batch, a.context_bits)?;
                for (c, w, kl) in &contexts {
                    rows.push([a.asset_id.clone(), c.clone(), w.to_string(), kl.to_string()]);
                }
                per_asset.insert(
                    a.asset_id.clone(),
                    json!({
                        "kl": weighted_conditional_kl(&a.joint, &batch, a.context_bits)?,
                        "kl_basis": weighted_conditional_kl(&a.joint, &basis, a.context_bits)?,
                        "preservation": context_preservation_score(&circuit, &model.params, &layout, &ctx, label)?,
                        "per_context": contexts.iter().map(|(c, w, kl)| json!({"context": c, "weight": w, "kl": kl})).collect::<Vec<_>>(),
                    }),
                );
            }
            let value = json!({ "split": split, "assets": per_asset });
            if let Some(dir) = out_dir {
                prepare_dir(&dir, &cfg)?;
                write_json(dir.join("eval.json"), &value)?;
                write_csv(dir.join("eval.csv"), &["asset", "context", "weight", "kl"], rows)?;
            }
            emit(out, &value)
        }
    }
}

fn arch_name(arch: &ModelArch) -> &'static str {
    match arch {
        ModelArch::Loader { .. } => "loader",
        ModelArch::Qstl { .. } => "stl",
        ModelArch::Qmtl { .. } => "mtl",
    }
}

fn most_frequent_context(model: &Model, label: Option<usize>) -> Result<usize> {
    let asset = model
        .assets
        .get(label.unwrap_or(0))
        .ok_or_else(|| Error::Config("model carries no training data; pass --context".into()))?;
    let probs = asset.context_dist();
    // First maximum, so ties resolve to the smallest context.
    Ok(probs
        .probs()
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
        .0)
}
