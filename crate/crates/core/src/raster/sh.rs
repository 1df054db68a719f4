//! Real spherical-harmonic basis for view-dependent color (degrees 0-2).

use nalgebra::Vector3;

pub const SH_C0: f64 = 0.282_094_791_773_878_14;
pub const SH_C1: f64 = 0.488_602_511_902_919_9;
pub const SH_C2: [f64; 5] = [
    1.092_548_430_592_079_2,
    -1.092_548_430_592_079_2,
    0.315_391_565_252_520_05,
    -1.092_548_430_592_079_2,
    0.546_274_215_296_039_6,
];

pub const MAX_SH_DEGREE: usize = 2;

/// Basis values for a unit direction; only the first (deg+1)^2 entries are
/// meaningful.
pub fn eval_sh_basis(degree: usize, dir: Vector3<f64>) -> [f64; 9] {
    let mut b = [0.0; 9];
    b[0] = SH_C0;
    if degree >= 1 {
        b[1] = -SH_C1 * dir.y;
        b[2] = SH_C1 * dir.z;
        b[3] = -SH_C1 * dir.x;
    }
    if degree >= 2 {
        let (x, y, z) = (dir.x, dir.y, dir.z);
        b[4] = SH_C2[0] * x * y;
        b[5] = SH_C2[1] * y * z;
        b[6] = SH_C2[2] * (2.0 * z * z - x * x - y * y);
        b[7] = SH_C2[3] * x * z;
        b[8] = SH_C2[4] * (x * x - y * y);
    }
    b
}

/// Derivatives of each basis value with respect to the (unnormalized-input,
/// post-normalization) direction components.
pub fn eval_sh_basis_dir_grad(degree: usize, dir: Vector3<f64>) -> [Vector3<f64>; 9] {
    let mut g = [Vector3::zeros(); 9];
    if degree >= 1 {
        g[1] = Vector3::new(0.0, -SH_C1, 0.0);
        g[2] = Vector3::new(0.0, 0.0, SH_C1);
        g[3] = Vector3::new(-SH_C1, 0.0, 0.0);
    }
    if degree >= 2 {
        let (x, y, z) = (dir.x, dir.y, dir.z);
        g[4] = Vector3::new(SH_C2[0] * y, SH_C2[0] * x, 0.0);
        g[5] = Vector3::new(0.0, SH_C2[1] * z, SH_C2[1] * y);
        g[6] = Vector3::new(
            -2.0 * SH_C2[2] * x,
            -2.0 * SH_C2[2] * y,
            4.0 * SH_C2[2] * z,
        );
        g[7] = Vector3::new(SH_C2[3] * z, 0.0, SH_C2[3] * x);
        g[8] = Vector3::new(2.0 * SH_C2[4] * x, -2.0 * SH_C2[4] * y, 0.0);
    }
    g
}

/// View-dependent color: 0.5 + sum_k basis_k * h[k*3+ch], clamped at zero.
pub fn sh_color(sh: &[f64], degree: usize, dir: Vector3<f64>) -> Vector3<f64> {
    let k = (degree + 1) * (degree + 1);
    debug_assert_eq!(sh.len(), k * 3);
    let basis = eval_sh_basis(degree, dir);
    let mut c = Vector3::new(0.5, 0.5, 0.5);
    for (i, &b) in basis.iter().take(k).enumerate() {
        c.x += b * sh[i * 3];
        c.y += b * sh[i * 3 + 1];
        c.z += b * sh[i * 3 + 2];
    }
    c.map(|v| v.max(0.0))
}

/// DC coefficient that reproduces `rgb` under `sh_color` for any direction
/// when all higher-order coefficients are zero.
pub fn rgb_to_sh_dc(rgb: Vector3<f64>) -> Vector3<f64> {
    (rgb - Vector3::new(0.5, 0.5, 0.5)) / SH_C0
}

pub fn sh_dc_to_rgb(dc: Vector3<f64>) -> Vector3<f64> {
    dc * SH_C0 + Vector3::new(0.5, 0.5, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dc_roundtrip() {
        let rgb = Vector3::new(0.2, 0.7, 0.9);
        let dc = rgb_to_sh_dc(rgb);
        assert_relative_eq!(sh_dc_to_rgb(dc), rgb, epsilon = 1e-12);
        let mut sh = vec![0.0; 12];
        sh[0] = dc.x;
        sh[1] = dc.y;
        sh[2] = dc.z;
        let c = sh_color(&sh, 1, Vector3::new(0.0, 0.0, 1.0));
        assert_relative_eq!(c, rgb, epsilon = 1e-12);
    }

    #[test]
    fn degree1_direction_dependence() {
        let mut sh = vec![0.0; 12];
        sh[2 * 3] = 0.3; // z-coefficient of the red channel
        let cz = sh_color(&sh, 1, Vector3::new(0.0, 0.0, 1.0));
        let cnz = sh_color(&sh, 1, Vector3::new(0.0, 0.0, -1.0));
        assert_relative_eq!(cz.x, 0.5 + SH_C1 * 0.3, epsilon = 1e-12);
        assert_relative_eq!(cnz.x, 0.5 - SH_C1 * 0.3, epsilon = 1e-12);
    }
}
