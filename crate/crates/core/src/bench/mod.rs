//! Synthetic benchmarks: circle bias, T-shape convergence, potential
//! profiles, and snakes/level-set cross checks.

mod experiments;

pub use experiments::{
    run_circle_experiment, run_equivalence_experiment, run_tshape_experiment, BenchConfig,
    CircleBench, EquivalenceBench, EquivalenceReport, MethodParams, TShapeBench,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::forces::ForceKind;
use crate::grid::ScalarField;
use crate::snakes::{Contour, Point};

/// Sample spacing along result contours for the error metrics, in pixels.
pub const ERROR_SAMPLE_SPACING: f64 = 0.25;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub iterations: usize,
    /// Seconds spent in the evolution loop; force precomputation excluded.
    pub wall_time: f64,
    pub converged: bool,
    /// Total vertex clamps at the raster border (snakes only).
    pub clamped_vertices: usize,
    /// Band rebuilds (level set only).
    pub reinit_count: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryError {
    pub mean: f64,
    pub max: f64,
    /// Mean signed distance; negative when the result lies inside the truth.
    pub signed_bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub method: ForceKind,
    pub report: EvolutionReport,
    pub mean_error: f64,
    pub max_error: f64,
    pub signed_bias: f64,
    pub contour: Contour,
}

impl BenchmarkResult {
    pub fn new(
        method: ForceKind,
        report: EvolutionReport,
        contour: Contour,
        truth: &Contour,
    ) -> Self {
        let e = boundary_error(&contour, truth);
        Self {
            method,
            report,
            mean_error: e.mean,
            max_error: e.max,
            signed_bias: e.signed_bias,
            contour,
        }
    }
}

/// Distances from dense samples of `result` to the polyline `truth`.
/// Samples inside `truth` (even-odd) count negative in the bias.
pub fn boundary_error(result: &Contour, truth: &Contour) -> BoundaryError {
    let samples = result.dense_samples(ERROR_SAMPLE_SPACING);
    let mut sum = 0.0;
    let mut signed = 0.0;
    let mut max: f64 = 0.0;
    for &p in &samples {
        let d = truth.distance(p);
        sum += d;
        max = max.max(d);
        signed += if truth.contains(p) { -d } else { d };
    }
    let n = samples.len() as f64;
    BoundaryError {
        mean: sum / n,
        max,
        signed_bias: signed / n,
    }
}

/// Symmetric Hausdorff distance between two polylines, using dense samples
/// of each against the other.
pub fn hausdorff(a: &Contour, b: &Contour) -> f64 {
    let one_way = |p: &Contour, q: &Contour| {
        p.dense_samples(ERROR_SAMPLE_SPACING)
            .into_iter()
            .map(|s| q.distance(s))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// `samples` bilinear values at uniform spacing from `start` to `end`,
/// paired with the arclength from `start`.
pub fn potential_profile(
    field: &ScalarField,
    start: Point,
    end: Point,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    ensure(samples >= 2, || {
        format!("profile needs >= 2 samples, got {samples}")
    })?;
    let (w, h) = field.shape();
    let inside =
        |p: Point| p.x >= 0.0 && p.y >= 0.0 && p.x <= (w - 1) as f64 && p.y <= (h - 1) as f64;
    ensure(inside(start) && inside(end), || {
        "profile segment must lie inside the grid".into()
    })?;
    let len = start.distance(end);
    Ok((0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            let p = start + (end - start) * t;
            (t * len, field.sample(p.x, p.y))
        })
        .collect())
}

/// Arclength of the largest profile value; the first one on ties.
pub fn profile_peak(profile: &[(f64, f64)]) -> f64 {
    profile
        .iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, &(s, v)| {
            if v > best.1 {
                (s, v)
            } else {
                best
            }
        })
        .0
}

/// Table-1-shaped summary: one row per method.
pub fn results_csv(results: &[BenchmarkResult]) -> String {
    let mut out =
        String::from("method,iterations,wall_time,converged,mean_error,max_error,signed_bias\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{:.6},{},{:.6},{:.6},{:.6}\n",
            r.method.name(),
            r.report.iterations,
            r.report.wall_time,
            r.report.converged,
            r.mean_error,
            r.max_error,
            r.signed_bias
        ));
    }
    out
}

/// Two-column `s,value` CSV.
pub fn profile_csv(profile: &[(f64, f64)]) -> String {
    let mut out = String::from("s,value\n");
    for (s, v) in profile {
        out.push_str(&format!("{s},{v}\n"));
    }
    out
}
