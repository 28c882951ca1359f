//! Raster types, PGM I/O, finite differences, edge maps and synthetic shapes.

mod edge;
mod pgm;
mod synth;

pub use edge::{edge_map, gaussian_smooth, EdgeParams};
pub use pgm::{load_pgm, save_pgm, PgmFormat};
pub use synth::{synth_circle, synth_t_shape, CircleSpec, Rect, SynthShape, TShapeSpec};

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Real-valued raster stored row-major. At least 3x3, all values finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::FieldTooSmall { width, height });
        }
        if values.len() != width * height {
            return Err(Error::FieldLength {
                expected: width * height,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: i % width,
                y: i / width,
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        let i = self.index(x, y);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access to the raw cells. Callers must keep values finite.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Bilinear interpolation at a sub-pixel position. Positions outside the
    /// raster are clamped to the border cells.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let xmax = (self.width - 1) as f64;
        let ymax = (self.height - 1) as f64;
        let x = x.clamp(0.0, xmax);
        let y = y.clamp(0.0, ymax);
        let x0 = (x.floor() as usize).min(self.width - 2);
        let y0 = (y.floor() as usize).min(self.height - 2);
        let tx = x - x0 as f64;
        let ty = y - y0 as f64;
        let v00 = self.get(x0, y0);
        let v10 = self.get(x0 + 1, y0);
        let v01 = self.get(x0, y0 + 1);
        let v11 = self.get(x0 + 1, y0 + 1);
        let top = v00 + tx * (v10 - v00);
        let bottom = v01 + tx * (v11 - v01);
        top + ty * (bottom - top)
    }

    /// One line per raster row, comma separated, `.` decimal point.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 12);
        for row in self.values.chunks(self.width) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Paired x/y rasters of identical shape.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub fx: ScalarField,
    pub fy: ScalarField,
}

impl VectorField {
    pub fn new(fx: ScalarField, fy: ScalarField) -> Result<Self> {
        if fx.shape() != fy.shape() {
            return Err(Error::DimensionMismatch(fx.shape(), fy.shape()));
        }
        Ok(Self { fx, fy })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Ok(Self {
            fx: ScalarField::zeros(width, height)?,
            fy: ScalarField::zeros(width, height)?,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.fx.shape()
    }

    pub fn width(&self) -> usize {
        self.fx.width()
    }

    pub fn height(&self) -> usize {
        self.fx.height()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> (f64, f64) {
        (self.fx.get(x, y), self.fy.get(x, y))
    }

    /// Bilinear sample of both components, clamped to the raster.
    pub fn sample(&self, x: f64, y: f64) -> (f64, f64) {
        (self.fx.sample(x, y), self.fy.sample(x, y))
    }

    pub fn magnitude(&self) -> ScalarField {
        let values = self
            .fx
            .values()
            .iter()
            .zip(self.fy.values())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        ScalarField {
            width: self.fx.width,
            height: self.fx.height,
            values,
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.fx
            .values()
            .iter()
            .zip(self.fy.values())
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }

    /// Multiplies both components by `s`.
    pub fn scaled(&self, s: f64) -> VectorField {
        VectorField {
            fx: self.fx.map(|v| v * s),
            fy: self.fy.map(|v| v * s),
        }
    }
}

/// 8-bit grayscale image. Any size of at least 1x1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidShape(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::FieldLength {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn to_field(&self) -> Result<ScalarField> {
        ScalarField::new(
            self.width,
            self.height,
            self.pixels.iter().map(|&p| f64::from(p)).collect(),
        )
    }
}

/// Partial derivatives of `f`: central differences in the interior,
/// one-sided differences on the border rows and columns.
pub fn gradient(f: &ScalarField) -> VectorField {
    let (w, h) = f.shape();
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            gx[i] = if x == 0 {
                f.get(1, y) - f.get(0, y)
            } else if x == w - 1 {
                f.get(w - 1, y) - f.get(w - 2, y)
            } else {
                0.5 * (f.get(x + 1, y) - f.get(x - 1, y))
            };
            gy[i] = if y == 0 {
                f.get(x, 1) - f.get(x, 0)
            } else if y == h - 1 {
                f.get(x, h - 1) - f.get(x, h - 2)
            } else {
                0.5 * (f.get(x, y + 1) - f.get(x, y - 1))
            };
        }
    }
    VectorField {
        fx: ScalarField {
            width: w,
            height: h,
            values: gx,
        },
        fy: ScalarField {
            width: w,
            height: h,
            values: gy,
        },
    }
}
