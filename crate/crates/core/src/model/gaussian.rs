//! Dynamic Gaussian primitives: raw (unconstrained) and activated forms.

use nalgebra::Vector3;

use super::quat::Quat;
use crate::error::{Error, Result};

/// Scale activation clamp bounds, in scene units.
pub const SCALE_MIN: f64 = 1e-4;
pub const SCALE_MAX: f64 = 1e2;

/// Which input image a Gaussian was instantiated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceFrame {
    /// Frame at time t (the canonical image).
    First,
    /// Frame at time t+1.
    Second,
}

impl SourceFrame {
    /// Time offset of the source frame relative to the canonical time.
    pub fn delta_t(self) -> f64 {
        match self {
            SourceFrame::First => 0.0,
            SourceFrame::Second => 1.0,
        }
    }
}

/// Number of spherical-harmonic coefficients per channel for a degree.
pub const fn sh_coeff_count(degree: usize) -> usize {
    (degree + 1) * (degree + 1)
}

/// Unconstrained optimization variables for one Gaussian.
///
/// `activate` maps these to a valid [`DynamicGaussian`]; the map is total on
/// finite inputs with a non-degenerate rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawGaussian {
    pub center: Vector3<f64>,
    pub motion: Vector3<f64>,
    /// Unnormalized quaternion (w, x, y, z).
    pub rotation: [f64; 4],
    /// Log-scale; activated as exp with clamping.
    pub log_scale: Vector3<f64>,
    /// SH coefficients, coefficient-major: `sh[k*3 + channel]`.
    pub sh: Vec<f64>,
    /// Pre-sigmoid opacity.
    pub opacity: f64,
    pub source_frame: SourceFrame,
    /// (row, col) of the source pixel.
    pub source_pixel: (u32, u32),
}

/// One dynamic 3D Gaussian: center, linear motion, anisotropic covariance
/// given by rotation and scale, SH color, and opacity.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicGaussian {
    pub center: Vector3<f64>,
    /// Motion in scene units per unit time-step, in canonical coordinates.
    pub motion: Vector3<f64>,
    /// Unit quaternion.
    pub rotation: Quat,
    /// Strictly positive per-axis scale.
    pub scale: Vector3<f64>,
    /// SH coefficients, coefficient-major: `sh[k*3 + channel]`.
    pub sh: Vec<f64>,
    /// Opacity in [0, 1].
    pub opacity: f64,
    pub source_frame: SourceFrame,
    pub source_pixel: (u32, u32),
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Map raw parameters to an activated Gaussian.
///
/// opacity = logistic(raw), scale = clamp(exp(raw)), rotation is normalized;
/// center, motion and SH pass through unchanged.
pub fn activate(raw: &RawGaussian) -> Result<DynamicGaussian> {
    let finite = raw.center.iter().all(|v| v.is_finite())
        && raw.motion.iter().all(|v| v.is_finite())
        && raw.rotation.iter().all(|v| v.is_finite())
        && raw.log_scale.iter().all(|v| v.is_finite())
        && raw.sh.iter().all(|v| v.is_finite())
        && raw.opacity.is_finite();
    if !finite {
        return Err(Error::invalid("non-finite raw Gaussian parameters"));
    }
    let rotation = Quat::from_array(raw.rotation).normalized()?;
    let scale = raw.log_scale.map(|v| v.exp().clamp(SCALE_MIN, SCALE_MAX));
    Ok(DynamicGaussian {
        center: raw.center,
        motion: raw.motion,
        rotation,
        scale,
        sh: raw.sh.clone(),
        opacity: logistic(raw.opacity),
        source_frame: raw.source_frame,
        source_pixel: raw.source_pixel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn raw_with(rotation: [f64; 4], log_scale: Vector3<f64>, opacity: f64) -> RawGaussian {
        RawGaussian {
            center: Vector3::zeros(),
            motion: Vector3::zeros(),
            rotation,
            log_scale,
            sh: vec![0.0; 3],
            opacity,
            source_frame: SourceFrame::First,
            source_pixel: (0, 0),
        }
    }

    #[test]
    fn activation_fixed_points() {
        let g = activate(&raw_with([2.0, 0.0, 0.0, 0.0], Vector3::zeros(), 0.0)).unwrap();
        assert_relative_eq!(g.opacity, 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.scale, Vector3::new(1.0, 1.0, 1.0), epsilon = 1e-15);
        assert_relative_eq!(g.rotation.w, 1.0, epsilon = 1e-15);
        assert_eq!(g.rotation.x, 0.0);
    }

    #[test]
    fn non_finite_raw_is_rejected() {
        let mut raw = raw_with([1.0, 0.0, 0.0, 0.0], Vector3::zeros(), 0.0);
        raw.center.x = f64::NAN;
        assert!(activate(&raw).is_err());
    }

    #[test]
    fn scale_clamps() {
        let g = activate(&raw_with(
            [1.0, 0.0, 0.0, 0.0],
            Vector3::new(-30.0, 30.0, 0.0),
            0.0,
        ))
        .unwrap();
        assert_eq!(g.scale.x, SCALE_MIN);
        assert_eq!(g.scale.y, SCALE_MAX);
    }
}
