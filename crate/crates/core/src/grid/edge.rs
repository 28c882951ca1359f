use serde::{Deserialize, Serialize};

use super::{gradient, GrayImage, ScalarField};
use crate::error::{ensure, Result};

/// Smoothing and threshold for [`edge_map`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeParams {
    pub sigma: f64,
    pub threshold: f64,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            threshold: 0.05,
        }
    }
}

impl EdgeParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.sigma >= 0.0 && self.sigma.is_finite(), || {
            format!("edge.sigma must be >= 0, got {}", self.sigma)
        })?;
        ensure((0.0..=1.0).contains(&self.threshold), || {
            format!("edge.threshold must lie in [0, 1], got {}", self.threshold)
        })
    }

    pub fn apply(&self, image: &GrayImage) -> Result<ScalarField> {
        edge_map(image, self.sigma, self.threshold)
    }
}

/// Separable Gaussian blur, kernel truncated at `ceil(3 sigma)` and
/// renormalized. Borders replicate the edge cell. `sigma == 0` is a no-op.
pub fn gaussian_smooth(f: &ScalarField, sigma: f64) -> ScalarField {
    if sigma <= 0.0 {
        return f.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= norm);

    let (w, h) = f.shape();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, c)| c * f.get(clamp(x as isize + k as isize - radius, w), y))
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, c)| c * tmp[clamp(y as isize + k as isize - radius, h) * w + x])
                .sum();
        }
    }
    ScalarField::new(w, h, out).expect("shape preserved")
}

/// Gradient-magnitude edge map normalized to `[0, 1]`.
///
/// Values below `threshold` (a fraction of the maximum) are zeroed, so the
/// map's support is exactly the set of cells that act as charges or heat
/// sources downstream.
pub fn edge_map(image: &GrayImage, smooth_sigma: f64, threshold: f64) -> Result<ScalarField> {
    EdgeParams {
        sigma: smooth_sigma,
        threshold,
    }
    .validate()?;
    let smoothed = gaussian_smooth(&image.to_field()?, smooth_sigma);
    let mut mag = gradient(&smoothed).magnitude();
    let max = mag.max();
    if max <= 0.0 {
        return Ok(mag.map(|_| 0.0));
    }
    for v in mag.values_mut() {
        *v /= max;
        if *v < threshold {
            *v = 0.0;
        }
    }
    Ok(mag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::synth_circle;

    #[test]
    fn constant_image_has_no_edges() {
        let img = GrayImage::filled(10, 8, 128).unwrap();
        let e = edge_map(&img, 1.5, 0.0).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_edge_is_confined_to_the_step() {
        let mut img = GrayImage::filled(12, 6, 0).unwrap();
        for y in 0..6 {
            for x in 6..12 {
                img.set(x, y, 255);
            }
        }
        let e = edge_map(&img, 0.0, 0.0).unwrap();
        for y in 0..6 {
            for x in 0..12 {
                let v = e.get(x, y);
                if x == 5 || x == 6 {
                    assert_eq!(v, 1.0);
                } else {
                    assert_eq!(v, 0.0, "x={x}");
                }
            }
        }
    }

    #[test]
    fn values_are_normalized() {
        let s = synth_circle(&Default::default()).unwrap();
        let e = edge_map(&s.image, 1.0, 0.2).unwrap();
        assert_eq!(e.max(), 1.0);
        assert!(e
            .values()
            .iter()
            .all(|&v| v == 0.0 || (0.2..=1.0).contains(&v)));
    }

    #[test]
    fn circle_support_hugs_the_boundary() {
        let spec = crate::grid::CircleSpec::default();
        let s = synth_circle(&spec).unwrap();
        for sigma in [0.0, 1.0, 2.0] {
            let e = edge_map(&s.image, sigma, 0.01).unwrap();
            let reach = 1.0 + (3.0 * sigma).ceil();
            for y in 0..e.height() {
                for x in 0..e.width() {
                    if e.get(x, y) > 0.0 {
                        let d = (x as f64 - spec.center.0).hypot(y as f64 - spec.center.1);
                        assert!(
                            (d - spec.radius).abs() <= reach,
                            "sigma={sigma} cell ({x},{y}) at distance {d}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let img = GrayImage::filled(5, 5, 0).unwrap();
        assert!(edge_map(&img, -1.0, 0.1).is_err());
        assert!(edge_map(&img, 1.0, 1.5).is_err());
    }
}
