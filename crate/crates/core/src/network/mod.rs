//! Network specs, baseline initializers and BCE + Adam training.

mod init;
mod loss;
mod spec;
mod train;

pub use init::{init_baseline, InitScheme};
pub use loss::{bce_loss, PROB_CLAMP};
pub use spec::{sigmoid, Activation, Head, Layer, NetworkSpec, Output, LOGIT_CLAMP};
pub use train::{
    get_params, loss_and_gradient, set_params, train, train_with_validation, AdamState, EarlyStop, EpochRecord,
    LossCurve, TrainConfig,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("unknown initialization scheme {0:?} (expected random, xavier, kaiming or he)")]
    UnknownScheme(String),
    #[error("empty input")]
    Empty,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
}
