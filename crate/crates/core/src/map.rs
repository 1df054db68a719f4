//! Dense per-pixel float maps (row-major, channel-interleaved).

use nalgebra::Vector3;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ImageMap {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Row-major, channel-interleaved: `data[(r*width + c)*channels + ch]`.
    pub data: Vec<f64>,
}

impl ImageMap {
    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        ImageMap {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut m = ImageMap::zeros(width, height, channels);
        for r in 0..height {
            for c in 0..width {
                for ch in 0..channels {
                    *m.at_mut(r, c, ch) = f(r, c, ch);
                }
            }
        }
        m
    }

    #[inline]
    pub fn idx(&self, row: usize, col: usize, ch: usize) -> usize {
        (row * self.width + col) * self.channels + ch
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[self.idx(row, col, ch)]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize, ch: usize) -> &mut f64 {
        let i = self.idx(row, col, ch);
        &mut self.data[i]
    }

    /// First three channels at a pixel as a vector.
    #[inline]
    pub fn vec3(&self, row: usize, col: usize) -> Vector3<f64> {
        debug_assert!(self.channels >= 3);
        let i = self.idx(row, col, 0);
        Vector3::new(self.data[i], self.data[i + 1], self.data[i + 2])
    }

    #[inline]
    pub fn set_vec3(&mut self, row: usize, col: usize, v: Vector3<f64>) {
        let i = self.idx(row, col, 0);
        self.data[i] = v.x;
        self.data[i + 1] = v.y;
        self.data[i + 2] = v.z;
    }

    pub fn same_shape(&self, other: &ImageMap) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
    }

    pub fn check_shape(&self, width: usize, height: usize, channels: usize) -> Result<()> {
        if self.width != width || self.height != height || self.channels != channels {
            return Err(Error::contract(format!(
                "map shape {}x{}x{} does not match expected {}x{}x{}",
                self.width, self.height, self.channels, width, height, channels
            )));
        }
        Ok(())
    }
}

/// Boolean per-pixel validity mask.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl MaskMap {
    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        MaskMap {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = MaskMap::filled(width, height, false);
        for r in 0..height {
            for c in 0..width {
                m.data[r * width + c] = f(r, c);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.data[row * self.width + col] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Peak signal-to-noise ratio in dB between two maps in [0, 1].
pub fn psnr(a: &ImageMap, b: &ImageMap) -> f64 {
    assert!(a.same_shape(b));
    let n = a.data.len() as f64;
    let mse: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse <= 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}
