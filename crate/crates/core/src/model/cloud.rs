//! Gaussian clouds: the union of per-pixel Gaussians from both frames.

use super::camera::CameraIntrinsics;
use super::gaussian::{activate, DynamicGaussian, RawGaussian, SourceFrame};
use super::pose::RelativePose;
use super::quat::Quat;
use crate::error::{Error, Result};

/// Activated Gaussians from both frames, each tagged with its source frame
/// and source pixel.
#[derive(Clone, Debug)]
pub struct GaussianCloud {
    pub gaussians: Vec<DynamicGaussian>,
    pub count_first: usize,
    pub count_second: usize,
    /// SH degree shared by all Gaussians.
    pub sh_degree: usize,
    /// Whether second-frame Gaussians have been advected-and-negated into
    /// canonical (frame-t) time.
    pub canonicalized: bool,
}

impl GaussianCloud {
    pub fn len(&self) -> usize {
        self.gaussians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussians.is_empty()
    }
}

/// Raw (pre-activation) mirror of a cloud; these are the fit variables.
#[derive(Clone, Debug)]
pub struct RawCloud {
    pub gaussians: Vec<RawGaussian>,
    pub count_first: usize,
    pub count_second: usize,
    pub sh_degree: usize,
    pub canonicalized: bool,
}

impl RawCloud {
    pub fn len(&self) -> usize {
        self.gaussians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussians.is_empty()
    }

    pub fn activate(&self) -> Result<GaussianCloud> {
        let gaussians = self
            .gaussians
            .iter()
            .map(activate)
            .collect::<Result<Vec<_>>>()?;
        Ok(GaussianCloud {
            gaussians,
            count_first: self.count_first,
            count_second: self.count_second,
            sh_degree: self.sh_degree,
            canonicalized: self.canonicalized,
        })
    }
}

/// Move every second-frame Gaussian to canonical time: the center advances
/// along its motion (mu + v) and the motion vector is negated (-v), so both
/// frames describe the scene at time t. Field-level involution.
pub fn canonicalize_second_frame(cloud: &GaussianCloud) -> Result<GaussianCloud> {
    if cloud.canonicalized {
        return Err(Error::state(
            "cloud is already canonicalized; canonicalize_second_frame is a one-shot transform",
        ));
    }
    let mut out = cloud.clone();
    for g in &mut out.gaussians {
        if g.source_frame == SourceFrame::Second {
            g.center += g.motion;
            g.motion = -g.motion;
        }
    }
    out.canonicalized = true;
    Ok(out)
}

/// Raw-chart version of [`canonicalize_second_frame`]; the affected fields
/// (center, motion) activate as identity so the transform is the same.
pub fn canonicalize_second_frame_raw(cloud: &RawCloud) -> Result<RawCloud> {
    if cloud.canonicalized {
        return Err(Error::state(
            "cloud is already canonicalized; canonicalize_second_frame is a one-shot transform",
        ));
    }
    let mut out = cloud.clone();
    for g in &mut out.gaussians {
        if g.source_frame == SourceFrame::Second {
            g.center += g.motion;
            g.motion = -g.motion;
        }
    }
    out.canonicalized = true;
    Ok(out)
}

/// Raw pose variables: unnormalized quaternion plus translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawPose {
    pub q: [f64; 4],
    pub t: nalgebra::Vector3<f64>,
}

impl RawPose {
    pub const IDENTITY: RawPose = RawPose {
        q: [1.0, 0.0, 0.0, 0.0],
        t: nalgebra::Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn from_pose(p: &RelativePose) -> Self {
        RawPose {
            q: p.q.to_array(),
            t: p.t,
        }
    }

    pub fn activate(&self) -> Result<RelativePose> {
        RelativePose::new(Quat::from_array(self.q), self.t)
    }
}

/// A fitted two-frame scene: raw cloud, raw relative pose, and the shared
/// camera intrinsics.
#[derive(Clone, Debug)]
pub struct Scene {
    pub cloud: RawCloud,
    pub pose: RawPose,
    pub intrinsics: CameraIntrinsics,
}

impl Scene {
    pub fn activated_cloud(&self) -> Result<GaussianCloud> {
        self.cloud.activate()
    }

    pub fn activated_pose(&self) -> Result<RelativePose> {
        self.pose.activate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn tiny_cloud() -> GaussianCloud {
        let mk = |frame, center: Vector3<f64>, motion: Vector3<f64>| DynamicGaussian {
            center,
            motion,
            rotation: Quat::IDENTITY,
            scale: Vector3::new(0.1, 0.1, 0.1),
            sh: vec![0.0; 3],
            opacity: 0.5,
            source_frame: frame,
            source_pixel: (0, 0),
        };
        GaussianCloud {
            gaussians: vec![
                mk(SourceFrame::First, Vector3::new(1.0, 0.0, 2.0), Vector3::new(0.1, 0.0, 0.0)),
                mk(SourceFrame::Second, Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.0, 0.5)),
            ],
            count_first: 1,
            count_second: 1,
            sh_degree: 0,
            canonicalized: false,
        }
    }

    #[test]
    fn canonicalization_advects_and_negates_second_frame() {
        let c = canonicalize_second_frame(&tiny_cloud()).unwrap();
        assert_eq!(c.gaussians[0].center, Vector3::new(1.0, 0.0, 2.0));
        assert_eq!(c.gaussians[1].center, Vector3::new(0.0, 0.0, 1.5));
        assert_eq!(c.gaussians[1].motion, Vector3::new(0.0, 0.0, -0.5));
        assert!(c.canonicalized);
    }

    #[test]
    fn canonicalizing_twice_is_a_state_error() {
        let c = canonicalize_second_frame(&tiny_cloud()).unwrap();
        assert!(canonicalize_second_frame(&c).is_err());
    }

    #[test]
    fn zero_motion_is_untouched() {
        let mut cloud = tiny_cloud();
        cloud.gaussians[1].motion = Vector3::zeros();
        let c = canonicalize_second_frame(&cloud).unwrap();
        assert_eq!(c.gaussians[1].center, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(c.gaussians[1].motion, Vector3::zeros());
    }
}
