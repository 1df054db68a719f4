//! Quaternion algebra with the (w, x, y, z) Hamilton convention.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Quaternion stored as (w, x, y, z). Not necessarily unit-norm; operations
/// that require a unit quaternion say so.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quat::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn conjugate(self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }

    /// Normalize to unit length. Errors on near-zero or non-finite input.
    pub fn normalized(self) -> Result<Quat> {
        let n = self.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::invalid(format!(
                "cannot normalize quaternion with norm {n}"
            )));
        }
        Ok(Quat::new(self.w / n, self.x / n, self.y / n, self.z / n))
    }

    /// Hamilton product self * other.
    pub fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }

    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Quat {
        let half = 0.5 * angle;
        let a = axis.normalize() * half.sin();
        Quat::new(half.cos(), a.x, a.y, a.z)
    }

    /// Rotation angle in radians of a unit quaternion, in [0, pi].
    pub fn angle(self) -> f64 {
        let c = self.w.abs().min(1.0);
        2.0 * c.acos()
    }

    /// Rotate a vector by this unit quaternion.
    pub fn rotate(self, v: Vector3<f64>) -> Vector3<f64> {
        self.to_rotation_matrix_unchecked() * v
    }

    /// Rotation matrix of a unit quaternion, without the unit check.
    pub(crate) fn to_rotation_matrix_unchecked(self) -> Matrix3<f64> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

/// Convert a unit quaternion to a rotation matrix.
///
/// The result is orthonormal with determinant +1. Errors when the input is
/// not unit-norm within 1e-6.
pub fn quat_to_rotation(q: Quat) -> Result<Matrix3<f64>> {
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "quat_to_rotation expects a unit quaternion, got norm {n}"
        )));
    }
    Ok(q.to_rotation_matrix_unchecked())
}

/// Spherical linear interpolation between unit quaternions.
///
/// Sign-aligns `b` to `a` first so the shorter arc is taken; falls back to
/// normalized lerp for nearly-parallel inputs.
pub fn slerp(a: Quat, b: Quat, t: f64) -> Quat {
    let mut b = b;
    let mut d = a.dot(b);
    if d < 0.0 {
        b = b.neg();
        d = -d;
    }
    if d > 1.0 - 1e-10 {
        let lerped = Quat::new(
            a.w + t * (b.w - a.w),
            a.x + t * (b.x - a.x),
            a.y + t * (b.y - a.y),
            a.z + t * (b.z - a.z),
        );
        return lerped.normalized().unwrap_or(a);
    }
    let theta = d.clamp(-1.0, 1.0).acos();
    let s = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / s;
    let wb = (t * theta).sin() / s;
    Quat::new(
        wa * a.w + wb * b.w,
        wa * a.x + wb * b.x,
        wa * a.y + wb * b.y,
        wa * a.z + wb * b.z,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_gives_identity_matrix() {
        let r = quat_to_rotation(Quat::IDENTITY).unwrap();
        assert_relative_eq!(r, Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn pi_about_x_flips_y_and_z() {
        let r = quat_to_rotation(Quat::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        assert_relative_eq!(r, expected, epsilon = 1e-15);
    }

    #[test]
    fn near_zero_quaternion_is_rejected() {
        assert!(Quat::new(1e-15, 0.0, 0.0, 0.0).normalized().is_err());
        assert!(quat_to_rotation(Quat::new(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn slerp_hits_endpoints() {
        let a = Quat::from_axis_angle(Vector3::new(0.3, 1.0, -0.2), 0.7);
        let b = Quat::from_axis_angle(Vector3::new(-1.0, 0.1, 0.4), 1.9);
        let s0 = slerp(a, b, 0.0);
        let s1 = slerp(a, b, 1.0);
        for (got, want) in [(s0, a), (s1, b)] {
            assert!(got.dot(want).abs() > 1.0 - 1e-9);
        }
    }
}
