//! Feed-forward regressor: ReLU hidden layers, linear output, trained on
//! z-scored data.

mod gradcheck;
mod network;
mod persist;
mod train;

pub use gradcheck::{check_gradients, compare, numerical_gradient, GradCheckReport};
pub use network::{init_params, loss, ForwardPass, Gradients, Network};
pub use persist::{from_text, load_model, save_model, to_text};
pub use train::{train, MlpModel, Optimizer, TrainConfig, TrainReport};

/// Input, two hidden layers of 64, one output.
pub const DEFAULT_LAYER_SIZES: [usize; 4] = [3, 64, 64, 1];
