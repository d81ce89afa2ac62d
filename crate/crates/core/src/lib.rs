pub mod error;
pub mod classify;
pub mod enhance;
pub mod image;
pub mod metrics;
pub mod neural;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result, Warning};
pub use image::{ImageF32, Plane};
