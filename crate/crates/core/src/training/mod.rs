//! Parameter estimation for loaders, single-asset and multi-asset models.

pub mod config;
pub mod grad;
pub mod loss;
pub mod model;
mod trainer;

pub use config::{GradEstimator, InitScheme, LossKind, TrainConfig};
pub use grad::{grad_parameter_shift, grad_spsa, grad_spsa_with_alpha};
pub use loss::{dist_to_amplitudes, fidelity_loss, loss_eval, mse_loss, Example, LossTarget, Objective};
pub use model::{Model, ModelArch};
pub use trainer::{
    initial_params, qbgu_step, scheduled_asset, train_distribution_loader, train_qmtl, train_qstl, TrainReport,
};
