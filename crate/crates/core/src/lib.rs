//! A dynamic-3D-Gaussian 4D engine: renders images, point maps, and 3D
//! scene-flow maps at any continuous time and viewpoint, computes analytic
//! gradients of all rendered outputs, fits a dynamic Gaussian cloud plus
//! relative camera pose to a two-image pair, and evaluates geometry, motion
//! and pose.

pub mod error;
pub mod map;
pub mod model;
pub mod raster;

pub use error::{Error, Result};
