//! EWA-style perspective projection of a 3D Gaussian to screen space.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Vector2, Vector3};

use super::RasterConfig;
use crate::model::{CameraIntrinsics, DynamicGaussian, RelativePose};

/// Screen-space footprint of one Gaussian.
#[derive(Clone, Copy, Debug)]
pub struct Projected {
    pub mean2d: Vector2<f64>,
    /// Regularized 2D covariance (J W Sigma W^T J^T + eps I).
    pub cov2d: Matrix2<f64>,
    /// Camera-space z of the (advected) center.
    pub zdepth: f64,
}

/// Everything the backward pass needs to re-derive the projection chain.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ProjectionData {
    pub x_cam: Vector3<f64>,
    pub mean2d: Vector2<f64>,
    /// Projection Jacobian at the center.
    pub jac: Matrix2x3<f64>,
    /// View rotation.
    pub view_rot: Matrix3<f64>,
    /// 3D covariance in canonical coordinates.
    pub cov3d: Matrix3<f64>,
    /// Regularized 2D covariance.
    pub cov2d: Matrix2<f64>,
    /// Inverse of `cov2d`.
    pub conic: Matrix2<f64>,
    pub zdepth: f64,
    /// 3-sigma footprint half-extent in pixels.
    pub radius: f64,
}

pub(crate) fn pinhole_jacobian(k: &CameraIntrinsics, x_cam: Vector3<f64>) -> Matrix2x3<f64> {
    let iz = 1.0 / x_cam.z;
    let iz2 = iz * iz;
    Matrix2x3::new(
        k.fx * iz,
        0.0,
        -k.fx * x_cam.x * iz2,
        0.0,
        k.fy * iz,
        -k.fy * x_cam.y * iz2,
    )
}

/// Project an (already advected) center with covariance `cov3d` through
/// `view` and `k`. Returns `None` when the Gaussian is culled: behind the
/// near plane, singular after regularization, or its 3-sigma footprint
/// misses the image.
pub(crate) fn project_center(
    center: Vector3<f64>,
    cov3d: Matrix3<f64>,
    view: &RelativePose,
    k: &CameraIntrinsics,
    cfg: &RasterConfig,
) -> Option<ProjectionData> {
    let view_rot = view.rotation_matrix();
    let x_cam = view_rot * center + view.t;
    if x_cam.z <= cfg.z_near {
        return None;
    }
    let mean2d = k.project(x_cam);
    let jac = pinhole_jacobian(k, x_cam);
    let b = jac * view_rot;
    let mut cov2d = b * cov3d * b.transpose();
    cov2d[(0, 0)] += cfg.eps_reg;
    cov2d[(1, 1)] += cfg.eps_reg;
    let det = cov2d[(0, 0)] * cov2d[(1, 1)] - cov2d[(0, 1)] * cov2d[(1, 0)];
    if det <= 0.0 || !det.is_finite() {
        return None;
    }
    let conic = Matrix2::new(cov2d[(1, 1)], -cov2d[(0, 1)], -cov2d[(1, 0)], cov2d[(0, 0)]) / det;
    let mid = 0.5 * (cov2d[(0, 0)] + cov2d[(1, 1)]);
    let disc = (mid * mid - det).max(0.0).sqrt();
    let lambda_max = mid + disc;
    // Tiny slack keeps the box a strict superset of the cutoff ellipse
    // under rounding.
    let radius = cfg.cutoff_sigma * lambda_max.sqrt() + 1e-9;
    // Cull splats whose footprint misses the pixel-center grid entirely.
    let (w, h) = (k.width as f64, k.height as f64);
    if mean2d.x + radius < 0.5
        || mean2d.x - radius > w - 0.5
        || mean2d.y + radius < 0.5
        || mean2d.y - radius > h - 0.5
    {
        return None;
    }
    Some(ProjectionData {
        x_cam,
        mean2d,
        jac,
        view_rot,
        cov3d,
        cov2d,
        conic,
        zdepth: x_cam.z,
        radius,
    })
}

/// Project one Gaussian at its stored center (no advection).
pub fn project_gaussian(
    g: &DynamicGaussian,
    view: &RelativePose,
    k: &CameraIntrinsics,
    cfg: &RasterConfig,
) -> Option<Projected> {
    let cov3d = crate::model::build_covariance(g.rotation, g.scale).ok()?;
    project_center(g.center, cov3d, view, k, cfg).map(|p| Projected {
        mean2d: p.mean2d,
        cov2d: p.cov2d,
        zdepth: p.zdepth,
    })
}
