//! Forward differentiable 4D rasterizer: advect Gaussians to a continuous
//! time, project to a camera, depth-sort, and alpha-composite color, point,
//! flow, alpha and z-depth maps.

mod project;
mod sh;

pub use project::{project_gaussian, Projected};
pub use sh::{
    eval_sh_basis, eval_sh_basis_dir_grad, rgb_to_sh_dc, sh_color, sh_dc_to_rgb, MAX_SH_DEGREE,
    SH_C0, SH_C1, SH_C2,
};

pub(crate) use project::{pinhole_jacobian, project_center, ProjectionData};

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::ImageMap;
use crate::model::{
    build_covariance, CameraIntrinsics, GaussianCloud, RelativePose, Scene, SourceFrame,
};

/// Rasterizer constants. Defaults follow common splatting practice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterConfig {
    /// Regularization added to the 2D covariance diagonal, in px^2.
    pub eps_reg: f64,
    /// Footprint cutoff in standard deviations.
    pub cutoff_sigma: f64,
    /// Early-termination transmittance floor.
    pub t_min: f64,
    /// Near-plane depth; Gaussians at or behind it are culled.
    pub z_near: f64,
    /// Background color composited under the color channel with the
    /// remaining transmittance.
    pub background: Vector3<f64>,
    /// Row-band height used to partition rasterization work.
    pub tile_size: usize,
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig {
            eps_reg: 0.3,
            cutoff_sigma: 3.0,
            t_min: 1e-4,
            z_near: 0.01,
            background: Vector3::zeros(),
            tile_size: 16,
        }
    }
}

/// Which output channels a render should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttributeSet {
    pub color: bool,
    pub point: bool,
    pub flow: bool,
    pub alpha: bool,
    pub zdepth: bool,
}

impl AttributeSet {
    pub const ALL: AttributeSet = AttributeSet {
        color: true,
        point: true,
        flow: true,
        alpha: true,
        zdepth: true,
    };

    pub fn none() -> Self {
        AttributeSet {
            color: false,
            point: false,
            flow: false,
            alpha: false,
            zdepth: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.color || self.point || self.flow || self.alpha || self.zdepth)
    }
}

/// One render request: camera, view pose from canonical space, continuous
/// time offset, and the attribute channels to produce.
#[derive(Clone, Copy, Debug)]
pub struct RenderRequest {
    pub intrinsics: CameraIntrinsics,
    /// Map from canonical coordinates into the render camera; identity is
    /// the frame-t camera.
    pub view: RelativePose,
    /// Continuous time offset in [0, 1]; extrapolation is permitted and
    /// logged.
    pub delta_t: f64,
    pub attrs: AttributeSet,
}

impl RenderRequest {
    pub fn new(intrinsics: CameraIntrinsics, view: RelativePose, delta_t: f64) -> Self {
        RenderRequest {
            intrinsics,
            view,
            delta_t,
            attrs: AttributeSet::ALL,
        }
    }
}

/// Composited per-pixel outputs for one request. Channels that were not
/// requested are left zero-filled.
#[derive(Clone, Debug)]
pub struct RenderOutput {
    pub color: ImageMap,
    pub point: ImageMap,
    pub flow: ImageMap,
    pub alpha: ImageMap,
    pub zdepth: ImageMap,
    pub attrs: AttributeSet,
}

impl RenderOutput {
    fn zeros(width: usize, height: usize, attrs: AttributeSet) -> Self {
        RenderOutput {
            color: ImageMap::zeros(width, height, 3),
            point: ImageMap::zeros(width, height, 3),
            flow: ImageMap::zeros(width, height, 3),
            alpha: ImageMap::zeros(width, height, 1),
            zdepth: ImageMap::zeros(width, height, 1),
            attrs,
        }
    }
}

/// Shift every center along its motion by `delta_t`; all other fields are
/// untouched.
pub fn advect(cloud: &GaussianCloud, delta_t: f64) -> Result<GaussianCloud> {
    if !cloud.canonicalized {
        return Err(Error::contract("advect requires a canonicalized cloud"));
    }
    if !(0.0..=1.0).contains(&delta_t) {
        log::debug!("advecting outside [0,1]: delta_t = {delta_t}");
    }
    let mut out = cloud.clone();
    for g in &mut out.gaussians {
        g.center += g.motion * delta_t;
    }
    Ok(out)
}

/// A projected, view-advected Gaussian ready for compositing.
#[derive(Clone, Debug)]
pub(crate) struct Splat {
    pub gauss_id: u32,
    pub mean2d: Vector2<f64>,
    pub conic: Matrix2<f64>,
    pub zdepth: f64,
    pub radius: f64,
    pub opacity: f64,
    /// View-dependent RGB.
    pub color: Vector3<f64>,
    /// Advected canonical-space center at the requested time.
    pub point_attr: Vector3<f64>,
    /// Canonical-space motion.
    pub flow_attr: Vector3<f64>,
}

pub(crate) struct PreparedScene {
    /// Visible splats in front-to-back order (z, then Gaussian index).
    pub splats: Vec<Splat>,
    pub width: usize,
    pub height: usize,
}

/// Project all Gaussians at time `delta_t` and depth-sort them.
pub(crate) fn prepare(
    cloud: &GaussianCloud,
    req: &RenderRequest,
    cfg: &RasterConfig,
) -> Result<PreparedScene> {
    if !cloud.canonicalized {
        return Err(Error::contract("rasterize requires a canonicalized cloud"));
    }
    if req.attrs.is_empty() {
        return Err(Error::contract("render request has an empty attribute set"));
    }
    if !(0.0..=1.0).contains(&req.delta_t) {
        log::debug!("rendering outside [0,1]: delta_t = {}", req.delta_t);
    }
    let cam_center = req.view.camera_center();
    let mut splats = Vec::with_capacity(cloud.len());
    for (i, g) in cloud.gaussians.iter().enumerate() {
        let center_t = g.center + g.motion * req.delta_t;
        let cov3d = build_covariance(g.rotation, g.scale)?;
        let Some(p) = project_center(center_t, cov3d, &req.view, &req.intrinsics, cfg) else {
            continue;
        };
        let color = if req.attrs.color {
            let rel = center_t - cam_center;
            let n = rel.norm();
            let dir = if n > 1e-12 {
                rel / n
            } else {
                Vector3::new(0.0, 0.0, 1.0)
            };
            sh_color(&g.sh, cloud.sh_degree, dir)
        } else {
            Vector3::zeros()
        };
        splats.push(Splat {
            gauss_id: i as u32,
            mean2d: p.mean2d,
            conic: p.conic,
            zdepth: p.zdepth,
            radius: p.radius,
            opacity: g.opacity,
            color,
            point_attr: center_t,
            flow_attr: g.motion,
        });
    }
    // Depth order is recomputed per request; equal depths tie-break on the
    // Gaussian index so output is deterministic.
    splats.sort_by(|a, b| {
        a.zdepth
            .partial_cmp(&b.zdepth)
            .expect("finite splat depths")
            .then(a.gauss_id.cmp(&b.gauss_id))
    });
    Ok(PreparedScene {
        splats,
        width: req.intrinsics.width,
        height: req.intrinsics.height,
    })
}

/// Density of a splat at a pixel center, or `None` outside the cutoff.
#[inline]
pub(crate) fn splat_density(
    s: &Splat,
    px: f64,
    py: f64,
    cutoff2: f64,
) -> Option<(f64, Vector2<f64>)> {
    let dx = px - s.mean2d.x;
    let dy = py - s.mean2d.y;
    if dx.abs() > s.radius || dy.abs() > s.radius {
        return None;
    }
    let maha =
        s.conic[(0, 0)] * dx * dx + 2.0 * s.conic[(0, 1)] * dx * dy + s.conic[(1, 1)] * dy * dy;
    if !(maha <= cutoff2) {
        return None;
    }
    Some(((-0.5 * maha).exp(), Vector2::new(dx, dy)))
}

/// Per-band splat index lists; bands are horizontal strips of rows.
pub(crate) fn bin_splats_into_bands(
    prep: &PreparedScene,
    band_rows: usize,
) -> Vec<Vec<u32>> {
    let n_bands = prep.height.div_ceil(band_rows);
    let mut bands = vec![Vec::new(); n_bands];
    for (si, s) in prep.splats.iter().enumerate() {
        let r_min = (s.mean2d.y - s.radius - 0.5).ceil().max(0.0) as usize;
        let r_max = (s.mean2d.y + s.radius - 0.5).floor();
        if r_max < 0.0 {
            continue;
        }
        let r_max = (r_max as usize).min(prep.height - 1);
        if r_min > r_max {
            continue;
        }
        for band in (r_min / band_rows)..=(r_max / band_rows) {
            bands[band].push(si as u32);
        }
    }
    bands
}

struct BandOutput {
    color: Vec<f64>,
    point: Vec<f64>,
    flow: Vec<f64>,
    alpha: Vec<f64>,
    zdepth: Vec<f64>,
    fingerprint: u64,
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

#[inline]
fn fnv_step(h: u64, v: u64) -> u64 {
    (h ^ v).wrapping_mul(FNV_PRIME)
}

fn render_band(
    prep: &PreparedScene,
    band_list: &[u32],
    row0: usize,
    rows: usize,
    attrs: AttributeSet,
    cfg: &RasterConfig,
) -> BandOutput {
    let w = prep.width;
    let cutoff2 = cfg.cutoff_sigma * cfg.cutoff_sigma;
    let mut out = BandOutput {
        color: vec![0.0; if attrs.color { rows * w * 3 } else { 0 }],
        point: vec![0.0; if attrs.point { rows * w * 3 } else { 0 }],
        flow: vec![0.0; if attrs.flow { rows * w * 3 } else { 0 }],
        alpha: vec![0.0; if attrs.alpha { rows * w } else { 0 }],
        zdepth: vec![0.0; if attrs.zdepth { rows * w } else { 0 }],
        fingerprint: FNV_OFFSET,
    };
    for r in 0..rows {
        let py = (row0 + r) as f64 + 0.5;
        for c in 0..w {
            let px = c as f64 + 0.5;
            let mut transmittance = 1.0;
            let mut color = Vector3::zeros();
            let mut point = Vector3::zeros();
            let mut flow = Vector3::zeros();
            let mut alpha_acc = 0.0;
            let mut z_acc = 0.0;
            let mut pixel_hash = FNV_OFFSET;
            for &si in band_list {
                let s = &prep.splats[si as usize];
                let Some((g, _)) = splat_density(s, px, py, cutoff2) else {
                    continue;
                };
                let a = s.opacity * g;
                let weight = a * transmittance;
                if attrs.color {
                    color += s.color * weight;
                }
                if attrs.point {
                    point += s.point_attr * weight;
                }
                if attrs.flow {
                    flow += s.flow_attr * weight;
                }
                alpha_acc += weight;
                z_acc += s.zdepth * weight;
                pixel_hash = fnv_step(pixel_hash, s.gauss_id as u64 + 1);
                transmittance *= 1.0 - a;
                if transmittance < cfg.t_min {
                    pixel_hash = fnv_step(pixel_hash, u64::MAX);
                    break;
                }
            }
            if attrs.color {
                color += cfg.background * transmittance;
                let i = (r * w + c) * 3;
                out.color[i] = color.x;
                out.color[i + 1] = color.y;
                out.color[i + 2] = color.z;
            }
            if attrs.point {
                let i = (r * w + c) * 3;
                out.point[i] = point.x;
                out.point[i + 1] = point.y;
                out.point[i + 2] = point.z;
            }
            if attrs.flow {
                let i = (r * w + c) * 3;
                out.flow[i] = flow.x;
                out.flow[i + 1] = flow.y;
                out.flow[i + 2] = flow.z;
            }
            if attrs.alpha {
                out.alpha[r * w + c] = alpha_acc;
            }
            if attrs.zdepth {
                out.zdepth[r * w + c] = z_acc;
            }
            out.fingerprint = fnv_step(out.fingerprint, pixel_hash);
        }
    }
    out
}

/// Rasterize the cloud for one request, returning the composited maps and a
/// fingerprint of the discrete choices taken (contributor sets, depth order,
/// early-termination points). The fingerprint is independent of worker
/// count.
pub fn rasterize_fingerprinted(
    cloud: &GaussianCloud,
    req: &RenderRequest,
    cfg: &RasterConfig,
) -> Result<(RenderOutput, u64)> {
    let prep = prepare(cloud, req, cfg)?;
    let band_rows = cfg.tile_size.max(1);
    let bands = bin_splats_into_bands(&prep, band_rows);
    let outputs: Vec<BandOutput> = bands
        .par_iter()
        .enumerate()
        .map(|(bi, list)| {
            let row0 = bi * band_rows;
            let rows = band_rows.min(prep.height - row0);
            render_band(&prep, list, row0, rows, req.attrs, cfg)
        })
        .collect();

    let mut out = RenderOutput::zeros(prep.width, prep.height, req.attrs);
    let mut fingerprint = FNV_OFFSET;
    for (bi, band) in outputs.iter().enumerate() {
        let row0 = bi * band_rows;
        let rows = band_rows.min(prep.height - row0);
        let w = prep.width;
        if req.attrs.color {
            out.color.data[row0 * w * 3..(row0 + rows) * w * 3].copy_from_slice(&band.color);
        }
        if req.attrs.point {
            out.point.data[row0 * w * 3..(row0 + rows) * w * 3].copy_from_slice(&band.point);
        }
        if req.attrs.flow {
            out.flow.data[row0 * w * 3..(row0 + rows) * w * 3].copy_from_slice(&band.flow);
        }
        if req.attrs.alpha {
            out.alpha.data[row0 * w..(row0 + rows) * w].copy_from_slice(&band.alpha);
        }
        if req.attrs.zdepth {
            out.zdepth.data[row0 * w..(row0 + rows) * w].copy_from_slice(&band.zdepth);
        }
        fingerprint = fnv_step(fingerprint, band.fingerprint);
    }
    Ok((out, fingerprint))
}

/// Rasterize the cloud for one request.
pub fn rasterize(
    cloud: &GaussianCloud,
    req: &RenderRequest,
    cfg: &RasterConfig,
) -> Result<RenderOutput> {
    rasterize_fingerprinted(cloud, req, cfg).map(|(out, _)| out)
}

/// Composite an arbitrary per-Gaussian 3-vector attribute with the exact
/// compositing weights of `rasterize`. Substituting the advected centers
/// reproduces the point channel bit-exactly; substituting the motions
/// reproduces the flow channel.
pub fn composite_attribute(
    cloud: &GaussianCloud,
    req: &RenderRequest,
    cfg: &RasterConfig,
    values: &[Vector3<f64>],
) -> Result<ImageMap> {
    if values.len() != cloud.len() {
        return Err(Error::contract(format!(
            "attribute count {} does not match cloud size {}",
            values.len(),
            cloud.len()
        )));
    }
    let mut req = *req;
    req.attrs = AttributeSet {
        point: true,
        ..AttributeSet::none()
    };
    let mut prep = prepare(cloud, &req, cfg)?;
    for s in &mut prep.splats {
        s.point_attr = values[s.gauss_id as usize];
    }
    let bands = bin_splats_into_bands(&prep, cfg.tile_size.max(1));
    let mut out = ImageMap::zeros(prep.width, prep.height, 3);
    let band_rows = cfg.tile_size.max(1);
    for (bi, list) in bands.iter().enumerate() {
        let row0 = bi * band_rows;
        let rows = band_rows.min(prep.height - row0);
        let band = render_band(&prep, list, row0, rows, req.attrs, cfg);
        out.data[row0 * prep.width * 3..(row0 + rows) * prep.width * 3]
            .copy_from_slice(&band.point);
    }
    Ok(out)
}

/// Which of the two source frames a convenience render targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetFrame {
    /// Frame-t camera (identity view).
    Canonical,
    /// Frame-(t+1) camera (the scene's relative pose).
    Second,
}

impl TargetFrame {
    pub fn of_source(frame: SourceFrame) -> Self {
        match frame {
            SourceFrame::First => TargetFrame::Canonical,
            SourceFrame::Second => TargetFrame::Second,
        }
    }
}

/// Render the scene at `delta_t` from one of its two cameras.
pub fn render_at(
    scene: &Scene,
    delta_t: f64,
    target: TargetFrame,
    cfg: &RasterConfig,
) -> Result<RenderOutput> {
    let cloud = scene.activated_cloud()?;
    let view = match target {
        TargetFrame::Canonical => RelativePose::IDENTITY,
        TargetFrame::Second => scene.activated_pose()?,
    };
    let req = RenderRequest::new(scene.intrinsics, view, delta_t);
    rasterize(&cloud, &req, cfg)
}
