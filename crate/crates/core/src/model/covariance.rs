//! Covariance construction from rotation and scale.

use nalgebra::{Matrix3, Vector3};

use super::quat::{quat_to_rotation, Quat};
use crate::error::{Error, Result};

/// Sigma = R diag(s)^2 R^T for a unit quaternion r and positive scale s.
///
/// The result is symmetric PSD with eigenvalues {s1^2, s2^2, s3^2}.
pub fn build_covariance(r: Quat, s: Vector3<f64>) -> Result<Matrix3<f64>> {
    if !(s.x > 0.0 && s.y > 0.0 && s.z > 0.0) {
        return Err(Error::invalid(format!(
            "scale must be strictly positive, got {s:?}"
        )));
    }
    let rot = quat_to_rotation(r)?;
    let d = Matrix3::from_diagonal(&s.component_mul(&s));
    Ok(rot * d * rot.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_rotation_gives_diagonal() {
        let sigma = build_covariance(Quat::IDENTITY, Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, 4.0, 9.0));
        assert_relative_eq!(sigma, expected, epsilon = 1e-14);
    }

    #[test]
    fn axis_aligned_pi_rotation_keeps_variances() {
        // R = diag(1,-1,-1) permutes signs, not variances.
        let sigma =
            build_covariance(Quat::new(0.0, 1.0, 0.0, 0.0), Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, 4.0, 9.0));
        assert_relative_eq!(sigma, expected, epsilon = 1e-14);
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(build_covariance(Quat::IDENTITY, Vector3::new(1.0, 0.0, 1.0)).is_err());
    }
}
