//! Rigid transforms as quaternion + translation.

use nalgebra::{Matrix3, Vector3};

use super::quat::{quat_to_rotation, slerp, Quat};
use crate::error::Result;

/// Rigid map `x -> R(q) x + t` from canonical (first-frame camera)
/// coordinates into a camera frame. The identity pose is the canonical
/// camera itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativePose {
    /// Unit quaternion (w, x, y, z).
    pub q: Quat,
    /// Translation in scene units.
    pub t: Vector3<f64>,
}

impl RelativePose {
    pub const IDENTITY: RelativePose = RelativePose {
        q: Quat::IDENTITY,
        t: Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn new(q: Quat, t: Vector3<f64>) -> Result<Self> {
        Ok(RelativePose {
            q: q.normalized()?,
            t,
        })
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        RelativePose {
            q: Quat::IDENTITY,
            t,
        }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.q.to_rotation_matrix_unchecked()
    }

    pub fn transform_point(&self, p: Vector3<f64>) -> Vector3<f64> {
        self.rotation_matrix() * p + self.t
    }

    /// Camera center expressed in canonical coordinates: -R^T t.
    pub fn camera_center(&self) -> Vector3<f64> {
        -(self.rotation_matrix().transpose() * self.t)
    }

    pub fn is_identity(&self) -> bool {
        self.q == Quat::IDENTITY && self.t == Vector3::zeros()
    }
}

/// Composition `a . b`: apply `b` first, then `a`.
pub fn compose_pose(a: &RelativePose, b: &RelativePose) -> RelativePose {
    let q = a.q.mul(b.q);
    // Quaternion products of unit inputs drift; renormalize.
    let q = q.normalized().expect("unit quaternion product");
    let t = a.rotation_matrix() * b.t + a.t;
    RelativePose { q, t }
}

pub fn invert_pose(a: &RelativePose) -> RelativePose {
    let q_inv = a.q.conjugate();
    let t = -(q_inv.to_rotation_matrix_unchecked() * a.t);
    RelativePose { q: q_inv, t }
}

/// Pose interpolation: quaternion slerp plus linear translation.
pub fn interpolate_pose(a: &RelativePose, b: &RelativePose, t: f64) -> RelativePose {
    RelativePose {
        q: slerp(a.q, b.q, t),
        t: a.t * (1.0 - t) + b.t * t,
    }
}

/// Rotation matrix accessor that validates unit norm (used by callers that
/// accept external quaternions).
pub fn pose_rotation(pose: &RelativePose) -> Result<Matrix3<f64>> {
    quat_to_rotation(pose.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compose_identity_is_noop() {
        let p = RelativePose::new(
            Quat::from_axis_angle(Vector3::new(0.0, 1.0, 0.0), 0.3),
            Vector3::new(1.0, -2.0, 0.5),
        )
        .unwrap();
        let c = compose_pose(&RelativePose::IDENTITY, &p);
        assert_relative_eq!(c.t, p.t, epsilon = 1e-12);
        assert!(c.q.dot(p.q) > 1.0 - 1e-12);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let p = RelativePose::new(
            Quat::from_axis_angle(Vector3::new(0.2, -0.5, 1.0), 1.1),
            Vector3::new(0.3, 0.7, -1.2),
        )
        .unwrap();
        let i = compose_pose(&p, &invert_pose(&p));
        assert!(i.t.norm() < 1e-9);
        assert!(i.q.w.abs() > 1.0 - 1e-9);
    }

    #[test]
    fn double_inversion_restores() {
        let p = RelativePose::new(
            Quat::from_axis_angle(Vector3::new(1.0, 0.2, 0.0), -0.8),
            Vector3::new(-0.1, 0.4, 2.0),
        )
        .unwrap();
        let pp = invert_pose(&invert_pose(&p));
        assert_relative_eq!(pp.t, p.t, epsilon = 1e-9);
        assert!(pp.q.dot(p.q) > 1.0 - 1e-9);
    }

    #[test]
    fn z_translations_add() {
        let a = RelativePose::from_translation(Vector3::new(0.0, 0.0, 1.0));
        let b = RelativePose::from_translation(Vector3::new(0.0, 0.0, 2.0));
        let c = compose_pose(&a, &b);
        assert_relative_eq!(c.t, Vector3::new(0.0, 0.0, 3.0), epsilon = 1e-12);
    }
}
