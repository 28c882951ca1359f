//! Synthetic test images with their ground-truth outlines.

use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::error::{Error, Result};
use crate::snakes::{Contour, Point};

/// Vertices used for the ground-truth circle polygon.
const TRUTH_CIRCLE_VERTICES: usize = 256;
/// Minimum gap between a shape and the image border, in pixels.
const MARGIN: f64 = 3.0;

#[derive(Clone, Debug)]
pub struct SynthShape {
    pub image: GrayImage,
    pub truth: Contour,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CircleSpec {
    pub width: usize,
    pub height: usize,
    pub center: (f64, f64),
    pub radius: f64,
    pub fg: u8,
    pub bg: u8,
}

impl Default for CircleSpec {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            center: (32.0, 32.0),
            radius: 15.0,
            fg: 255,
            bg: 0,
        }
    }
}

/// Axis-aligned block of cells `x..x+w` by `y..y+h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    fn intersection_area(&self, other: &Rect) -> usize {
        let x0 = self.x.max(other.x);
        let x1 = (self.x + self.w).min(other.x + other.w);
        let y0 = self.y.max(other.y);
        let y1 = (self.y + self.h).min(other.y + other.h);
        x1.saturating_sub(x0) * y1.saturating_sub(y0)
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TShapeSpec {
    pub width: usize,
    pub height: usize,
    pub bar: Rect,
    pub stem: Rect,
    pub fg: u8,
    pub bg: u8,
}

impl Default for TShapeSpec {
    fn default() -> Self {
        Self {
            width: 128,
            height: 128,
            bar: Rect::new(34, 24, 60, 20),
            stem: Rect::new(54, 40, 20, 60),
            fg: 255,
            bg: 0,
        }
    }
}

impl TShapeSpec {
    pub fn union_area(&self) -> usize {
        self.bar.area() + self.stem.area() - self.bar.intersection_area(&self.stem)
    }
}

/// Disc of `fg` on `bg`. A cell whose center lies exactly `radius` from the
/// disc center is foreground.
pub fn synth_circle(spec: &CircleSpec) -> Result<SynthShape> {
    let (cx, cy) = spec.center;
    let r = spec.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidShape(format!(
            "radius must be positive, got {r}"
        )));
    }
    let xmax = spec.width as f64 - 1.0 - MARGIN;
    let ymax = spec.height as f64 - 1.0 - MARGIN;
    if cx - r < MARGIN || cy - r < MARGIN || cx + r > xmax || cy + r > ymax {
        return Err(Error::InvalidShape(format!(
            "circle at ({cx}, {cy}) radius {r} does not fit {}x{} with a {MARGIN} px margin",
            spec.width, spec.height
        )));
    }
    let mut image = GrayImage::filled(spec.width, spec.height, spec.bg)?;
    for y in 0..spec.height {
        for x in 0..spec.width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            if dx * dx + dy * dy <= r * r {
                image.set(x, y, spec.fg);
            }
        }
    }
    let truth = Contour::circle(Point::new(cx, cy), r, TRUTH_CIRCLE_VERTICES)?;
    Ok(SynthShape { image, truth })
}

/// Union of a horizontal bar and a vertical stem hanging below it.
///
/// The truth polygon runs along cell boundaries (half a pixel outside the
/// outermost foreground cell centers).
pub fn synth_t_shape(spec: &TShapeSpec) -> Result<SynthShape> {
    let (bar, stem) = (spec.bar, spec.stem);
    if bar.w == 0 || bar.h == 0 || stem.w == 0 || stem.h == 0 {
        return Err(Error::InvalidShape("empty rectangle".into()));
    }
    if bar.intersection_area(&stem) == 0 {
        return Err(Error::InvalidShape("bar and stem do not overlap".into()));
    }
    let forms_t = bar.x < stem.x
        && stem.x + stem.w < bar.x + bar.w
        && bar.y < stem.y
        && stem.y + stem.h > bar.y + bar.h;
    if !forms_t {
        return Err(Error::InvalidShape(
            "stem must hang below the bar and be narrower than it".into(),
        ));
    }
    let m = MARGIN as usize;
    for r in [bar, stem] {
        if r.x < m || r.y < m || r.x + r.w + m > spec.width || r.y + r.h + m > spec.height {
            return Err(Error::InvalidShape(format!(
                "rectangle {r:?} does not fit {}x{} with a {m} px margin",
                spec.width, spec.height
            )));
        }
    }

    let mut image = GrayImage::filled(spec.width, spec.height, spec.bg)?;
    for y in 0..spec.height {
        for x in 0..spec.width {
            if bar.contains(x, y) || stem.contains(x, y) {
                image.set(x, y, spec.fg);
            }
        }
    }

    let lo = |v: usize| v as f64 - 0.5;
    let hi = |v: usize, len: usize| (v + len) as f64 - 0.5;
    let (bl, br) = (lo(bar.x), hi(bar.x, bar.w));
    let (bt, bb) = (lo(bar.y), hi(bar.y, bar.h));
    let (sl, sr) = (lo(stem.x), hi(stem.x, stem.w));
    let sb = hi(stem.y, stem.h);
    let truth = Contour::new(vec![
        Point::new(bl, bt),
        Point::new(bl, bb),
        Point::new(sl, bb),
        Point::new(sl, sb),
        Point::new(sr, sb),
        Point::new(sr, bb),
        Point::new(br, bb),
        Point::new(br, bt),
    ])?;
    Ok(SynthShape { image, truth })
}
