pub mod bench;
pub mod error;
pub mod linalg;
pub mod l1;
pub mod l2;
pub mod sketch;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use sketch::{Rng, SketchKind, SketchSpec};
