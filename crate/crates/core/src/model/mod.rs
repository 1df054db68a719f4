//! Representation types, parameter activations, quaternion/pose algebra,
//! and covariance construction.

mod camera;
mod cloud;
mod covariance;
mod gaussian;
mod pose;
mod quat;

pub use camera::CameraIntrinsics;
pub use cloud::{
    canonicalize_second_frame, canonicalize_second_frame_raw, GaussianCloud, RawCloud, RawPose,
    Scene,
};
pub use covariance::build_covariance;
pub use gaussian::{
    activate, logistic, logit, sh_coeff_count, DynamicGaussian, RawGaussian, SourceFrame,
    SCALE_MAX, SCALE_MIN,
};
pub use pose::{compose_pose, interpolate_pose, invert_pose, pose_rotation, RelativePose};
pub use quat::{quat_to_rotation, slerp, Quat};
