//! Electrostatic potential: every edge cell is a charge of strength `g`
//! contributing `g / (k * r^lambda)` with `r^2 = dx^2 + dy^2 + h^2`.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::ElectroParams;
use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Evaluation strategy for the charge sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElectroMethod {
    /// Double loop over cells and charges.
    Direct,
    /// Zero-padded FFT convolution with the same kernel.
    #[default]
    Fft,
}

#[inline]
fn kernel(p: &ElectroParams, dx: f64, dy: f64) -> f64 {
    let r2 = dx * dx + dy * dy + p.h * p.h;
    if p.lambda == 1.0 {
        1.0 / (p.k * r2.sqrt())
    } else {
        1.0 / (p.k * r2.powf(0.5 * p.lambda))
    }
}

fn check_edge(edge: &ScalarField) -> Result<()> {
    if let Some(i) = edge.values().iter().position(|&g| g < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "edge map must be nonnegative; cell ({}, {}) is {}",
            i % edge.width(),
            i / edge.width(),
            edge.values()[i]
        )));
    }
    Ok(())
}

/// Potential of the edge map using the method selected in `p`.
pub fn electrostatic_potential(edge: &ScalarField, p: &ElectroParams) -> Result<ScalarField> {
    match p.method {
        ElectroMethod::Direct => electrostatic_potential_direct(edge, p),
        ElectroMethod::Fft => electrostatic_potential_fft(edge, p),
    }
}

/// Reference evaluation: sums every nonzero edge cell at every cell.
pub fn electrostatic_potential_direct(
    edge: &ScalarField,
    p: &ElectroParams,
) -> Result<ScalarField> {
    p.validate()?;
    check_edge(edge)?;
    let (w, h) = edge.shape();
    let charges: Vec<(f64, f64, f64)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter_map(|(x, y)| {
            let g = edge.get(x, y);
            (g > 0.0).then_some((x as f64, y as f64, g))
        })
        .collect();
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, cell) in row.iter_mut().enumerate() {
            let (xf, yf) = (x as f64, y as f64);
            *cell = charges
                .iter()
                .map(|&(cx, cy, g)| g * kernel(p, xf - cx, yf - cy))
                .sum();
        }
    });
    ScalarField::new(w, h, out)
}

/// FFT evaluation of the same sum. The kernel is translation invariant, so
/// the potential is a linear convolution; padding to `2w x 2h` removes the
/// circular wrap.
pub fn electrostatic_potential_fft(edge: &ScalarField, p: &ElectroParams) -> Result<ScalarField> {
    p.validate()?;
    check_edge(edge)?;
    let (w, h) = edge.shape();
    if edge.values().iter().all(|&g| g == 0.0) {
        return ScalarField::zeros(w, h);
    }
    let (nx, ny) = (2 * w, 2 * h);
    let mut charges = vec![Complex::new(0.0, 0.0); nx * ny];
    for y in 0..h {
        for x in 0..w {
            charges[y * nx + x].re = edge.get(x, y);
        }
    }
    let mut kern = vec![Complex::new(0.0, 0.0); nx * ny];
    for j in 0..ny {
        // offsets beyond the half-length wrap to negative displacements
        let dy = if j < h {
            j as f64
        } else {
            j as f64 - ny as f64
        };
        for i in 0..nx {
            let dx = if i < w {
                i as f64
            } else {
                i as f64 - nx as f64
            };
            kern[j * nx + i].re = kernel(p, dx, dy);
        }
    }

    let mut planner = FftPlanner::new();
    fft2(&mut planner, &mut charges, nx, ny, false);
    fft2(&mut planner, &mut kern, nx, ny, false);
    for (a, b) in charges.iter_mut().zip(&kern) {
        *a *= b;
    }
    fft2(&mut planner, &mut charges, nx, ny, true);

    let scale = 1.0 / (nx * ny) as f64;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            out.push(charges[y * nx + x].re * scale);
        }
    }
    ScalarField::new(w, h, out)
}

/// In-place unnormalized 2-D transform of a row-major `nx x ny` buffer.
fn fft2(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex<f64>],
    nx: usize,
    ny: usize,
    inverse: bool,
) {
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
    } else {
        (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
    };
    row_fft.process(data);
    let mut column = vec![Complex::new(0.0, 0.0); ny];
    for x in 0..nx {
        for y in 0..ny {
            column[y] = data[y * nx + x];
        }
        col_fft.process(&mut column);
        for y in 0..ny {
            data[y * nx + x] = column[y];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, method: ElectroMethod) -> ElectroParams {
        ElectroParams {
            lambda,
            k: 1.0,
            h: 1.0,
            method,
        }
    }

    /// Independent double loop written straight from the formula.
    fn oracle(edge: &ScalarField, lambda: f64, k: f64, h: f64) -> ScalarField {
        let (w, hh) = edge.shape();
        ScalarField::from_fn(w, hh, |x, y| {
            let mut s = 0.0;
            for yi in 0..hh {
                for xi in 0..w {
                    let g = edge.get(xi, yi);
                    if g != 0.0 {
                        let dx = x as f64 - xi as f64;
                        let dy = y as f64 - yi as f64;
                        let r = (dx * dx + dy * dy + h * h).sqrt();
                        s += g / (k * r.powf(lambda));
                    }
                }
            }
            s
        })
        .unwrap()
    }

    fn single_charge() -> ScalarField {
        let mut e = ScalarField::zeros(16, 16).unwrap();
        e.set(5, 5, 1.0);
        e
    }

    #[test]
    fn single_charge_values() {
        for method in [ElectroMethod::Direct, ElectroMethod::Fft] {
            let pot = electrostatic_potential(&single_charge(), &params(1.0, method)).unwrap();
            assert!((pot.get(5, 5) - 1.0).abs() < 1e-12);
            // r = sqrt(9 + 16 + 1)
            assert!((pot.get(8, 9) - 1.0 / 26f64.sqrt()).abs() < 1e-12);
            assert!((pot.get(8, 9) - 0.196116).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_map_gives_zero() {
        let e = ScalarField::zeros(8, 8).unwrap();
        for method in [ElectroMethod::Direct, ElectroMethod::Fft] {
            let pot = electrostatic_potential(&e, &params(1.0, method)).unwrap();
            assert!(pot.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn five_random_charges_match_oracle() {
        let mut e = ScalarField::zeros(32, 32).unwrap();
        for (x, y, g) in [
            (3, 4, 0.7),
            (20, 9, 1.0),
            (31, 31, 0.25),
            (0, 17, 0.5),
            (12, 28, 0.9),
        ] {
            e.set(x, y, g);
        }
        let want = oracle(&e, 0.5, 1.0, 1.0);
        for method in [ElectroMethod::Direct, ElectroMethod::Fft] {
            let got = electrostatic_potential(&e, &params(0.5, method)).unwrap();
            for (a, b) in got.values().iter().zip(want.values()) {
                assert!((a - b).abs() <= 1e-12 * b.abs(), "{method:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_negative_edges_and_bad_params() {
        let mut e = ScalarField::zeros(4, 4).unwrap();
        e.set(1, 1, -0.1);
        assert!(electrostatic_potential(&e, &ElectroParams::default()).is_err());
        let bad = ElectroParams {
            h: 0.0,
            ..Default::default()
        };
        assert!(electrostatic_potential(&single_charge(), &bad).is_err());
    }

    #[test]
    fn radially_symmetric() {
        let mut e = ScalarField::zeros(21, 21).unwrap();
        e.set(10, 10, 1.0);
        let pot = electrostatic_potential(&e, &params(0.5, ElectroMethod::Fft)).unwrap();
        // (13, 14), (14, 13), (7, 6), (6, 13) are all at offset magnitude 5
        let v = pot.get(13, 14);
        for (x, y) in [(14, 13), (7, 6), (6, 13), (15, 10), (10, 5)] {
            assert!((pot.get(x, y) - v).abs() < 1e-12 * v);
        }
    }
}
