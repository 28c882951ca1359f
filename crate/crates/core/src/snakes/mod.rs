//! Parametric active contours.
//!
//! A snake is a closed polyline whose vertices move under three forces: an
//! elastic term (the discrete second arclength derivative, which equals
//! curvature times the inward normal), a balloon term along the outward
//! normal, and the sampled external image force. Time stepping is explicit
//! Euler; the polyline is resampled to uniform spacing on a fixed cadence.

mod contour;

pub use contour::{fit_circle, segment_distance, Contour, Point, MIN_SPACING};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::EvolutionReport;
use crate::error::{ensure, Error, Result};
use crate::forces::ForceSource;
use crate::grid::VectorField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnakeParams {
    /// Elastic weight.
    pub alpha: f64,
    /// Balloon weight; positive inflates.
    pub beta: f64,
    /// Image-force weight.
    pub gamma: f64,
    pub dt: f64,
    pub resample_spacing: f64,
    /// Resample after every this many iterations; 0 disables resampling.
    pub resample_every: usize,
    pub max_iters: usize,
    /// Convergence threshold on the per-step shape change, in pixels.
    pub tol: f64,
    /// Consecutive iterations below `tol` required to stop.
    pub tol_window: usize,
}

impl Default for SnakeParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta: 0.0,
            gamma: 1.0,
            dt: 0.5,
            resample_spacing: 1.0,
            resample_every: 5,
            max_iters: 3000,
            tol: 0.01,
            tol_window: 10,
        }
    }
}

impl SnakeParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.dt > 0.0 && self.dt.is_finite(), || {
            format!("snakes.dt must be > 0, got {}", self.dt)
        })?;
        ensure(self.max_iters >= 1, || {
            "snakes.max_iters must be >= 1".into()
        })?;
        ensure(self.resample_spacing > 0.0, || {
            format!(
                "snakes.resample_spacing must be > 0, got {}",
                self.resample_spacing
            )
        })?;
        ensure(self.tol >= 0.0, || {
            format!("snakes.tol must be >= 0, got {}", self.tol)
        })?;
        ensure(
            [self.alpha, self.beta, self.gamma]
                .iter()
                .all(|v| v.is_finite()),
            || "snakes weights must be finite".into(),
        )
    }
}

/// Redistributes vertices at uniform arclength along the closed polyline,
/// starting from the first vertex. Uses `round(perimeter / spacing)`
/// vertices, at least 4.
pub fn resample(c: &Contour, spacing: f64) -> Contour {
    let verts = c.vertices();
    let n = verts.len();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for (a, b) in c.edges() {
        cum.push(cum.last().unwrap() + a.distance(b));
    }
    let perimeter = cum[n];
    let count = ((perimeter / spacing).round() as usize).max(4);
    let step = perimeter / count as f64;

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let s = k as f64 * step;
        while seg + 1 < n && cum[seg + 1] <= s {
            seg += 1;
        }
        let a = verts[seg];
        let b = verts[(seg + 1) % n];
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
        out.push(a + (b - a) * t);
    }
    Contour::from_points_dedup(out).unwrap_or_else(|_| c.clone())
}

/// Unit outward normals: the central-difference tangent rotated by -90
/// degrees.
pub fn outward_normals(c: &Contour) -> Vec<Point> {
    let v = c.vertices();
    let n = v.len();
    (0..n)
        .map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]).rot_cw().normalized())
        .collect()
}

/// Unit tangents along the vertex order (central differences).
pub fn tangents(c: &Contour) -> Vec<Point> {
    let v = c.vertices();
    let n = v.len();
    (0..n)
        .map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]).normalized())
        .collect()
}

/// `(C[i-1] - 2 C[i] + C[i+1]) / ds^2` with `ds` the mean vertex spacing.
pub fn elastic_term(c: &Contour) -> Vec<Point> {
    let v = c.vertices();
    let n = v.len();
    let ds = c.mean_spacing();
    let inv = 1.0 / (ds * ds);
    (0..n)
        .map(|i| (v[(i + n - 1) % n] + v[(i + 1) % n] - v[i] * 2.0) * inv)
        .collect()
}

/// Bilinear force at `p`; positions outside the raster clamp to the border.
pub fn sample_force(f: &VectorField, p: Point) -> Point {
    let (fx, fy) = f.sample(p.x, p.y);
    Point::new(fx, fy)
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub contour: Contour,
    /// Vertices pulled back inside the raster this step.
    pub clamped: usize,
    /// Largest vertex displacement of the step, before clamping.
    pub max_displacement: f64,
    pub mean_displacement: f64,
    /// Largest distance from a stepped vertex to the pre-step polyline.
    /// Sliding along the curve does not count.
    pub shape_change: f64,
}

/// One explicit Euler step with the image force sampled from `f`.
pub fn snakes_step(c: &Contour, f: &VectorField, p: &SnakeParams) -> Result<StepOutcome> {
    let forces: Vec<Point> = c.vertices().iter().map(|&v| sample_force(f, v)).collect();
    step_with_forces(c, &forces, p, f.shape())
}

/// One explicit Euler step with externally supplied per-vertex image forces.
///
/// Vertices leaving `[0, w-1] x [0, h-1]` are clamped back and counted.
pub fn step_with_forces(
    c: &Contour,
    forces: &[Point],
    p: &SnakeParams,
    (w, h): (usize, usize),
) -> Result<StepOutcome> {
    assert_eq!(forces.len(), c.len(), "one force per vertex");
    let elastic = elastic_term(c);
    let normals = outward_normals(c);
    let xmax = (w - 1) as f64;
    let ymax = (h - 1) as f64;
    let mut clamped = 0;
    let mut max_d: f64 = 0.0;
    let mut sum_d = 0.0;
    let moved: Vec<Point> = c
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let vel = elastic[i] * p.alpha + normals[i] * p.beta + forces[i] * p.gamma;
            let d = vel * p.dt;
            let dn = d.norm();
            max_d = max_d.max(dn);
            sum_d += dn;
            let q = v + d;
            let qc = Point::new(q.x.clamp(0.0, xmax), q.y.clamp(0.0, ymax));
            if qc != q {
                clamped += 1;
            }
            qc
        })
        .collect();
    let shape_change = shape_change(c.vertices(), &moved);
    Ok(StepOutcome {
        contour: Contour::from_points_dedup(moved)?,
        clamped,
        max_displacement: max_d,
        mean_displacement: sum_d / c.len() as f64,
        shape_change,
    })
}

/// Max over `moved[i]` of its distance to the old edges spanning vertices
/// `i-2 ..= i+2`.
/// Restricting to nearby edges can only overestimate the distance to the
/// whole polyline.
fn shape_change(old: &[Point], moved: &[Point]) -> f64 {
    let n = old.len();
    moved
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            (n - 2..n + 2)
                .map(|k| {
                    let j = (i + k) % n;
                    segment_distance(q, old[j], old[(j + 1) % n])
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Evolves `c0` until the per-step shape change (see
/// [`StepOutcome::shape_change`]) stays below `tol` for `tol_window`
/// consecutive iterations or `max_iters` is reached. A contour with more
/// vertices than the raster has cells fails with
/// [`Error::ContourRunaway`].
pub fn evolve_snake<F: ForceSource + ?Sized>(
    c0: &Contour,
    force: &F,
    p: &SnakeParams,
) -> Result<(Contour, EvolutionReport)> {
    evolve_snake_with(c0, force, p, |_, _| {})
}

/// [`evolve_snake`] with a callback invoked after every iteration.
pub fn evolve_snake_with<F: ForceSource + ?Sized>(
    c0: &Contour,
    force: &F,
    p: &SnakeParams,
    mut observer: impl FnMut(usize, &Contour),
) -> Result<(Contour, EvolutionReport)> {
    p.validate()?;
    let start = Instant::now();
    let shape = force.shape();
    let mut c = c0.clone();
    let mut report = EvolutionReport::default();
    let mut calm = 0;
    for it in 1..=p.max_iters {
        let forces: Vec<Point> = c.vertices().iter().map(|&v| force.sample(it, v)).collect();
        let out = step_with_forces(&c, &forces, p, shape)?;
        report.clamped_vertices += out.clamped;
        c = out.contour;
        if p.resample_every > 0 && it % p.resample_every == 0 {
            c = resample(&c, p.resample_spacing);
        }
        if c.len() > shape.0 * shape.1 {
            return Err(Error::ContourRunaway(c.len()));
        }
        report.iterations = it;
        observer(it, &c);
        if out.shape_change < p.tol {
            calm += 1;
            if calm >= p.tol_window {
                report.converged = true;
                break;
            }
        } else {
            calm = 0;
        }
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((c, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> Contour {
        Contour::circle(Point::new(32.0, 32.0), r, n).unwrap()
    }

    fn square(side: f64) -> Contour {
        Contour::new(vec![
            Point::new(0.0, 0.0),
            Point::new(side, 0.0),
            Point::new(side, side),
            Point::new(0.0, side),
        ])
        .unwrap()
    }

    fn spacings(c: &Contour) -> Vec<f64> {
        c.edges().map(|(a, b)| a.distance(b)).collect()
    }

    #[test]
    fn resample_square_to_unit_spacing() {
        let r = resample(&square(10.0), 1.0);
        assert_eq!(r.len(), 40);
        for s in spacings(&r) {
            assert!((s - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn resample_uniform_polygon_is_fixed_point() {
        let c = circle(10.0, 64);
        let r = resample(&c, c.mean_spacing());
        assert_eq!(r.len(), 64);
        for (a, b) in r.vertices().iter().zip(c.vertices()) {
            assert!(a.distance(*b) < 1e-6);
        }
    }

    #[test]
    fn resample_keeps_four_vertices_minimum() {
        let r = resample(&square(1.0), 2.0);
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn normals_point_outward() {
        let c = circle(10.0, 50);
        for (v, n) in c.vertices().iter().zip(outward_normals(&c)) {
            assert!((*v - Point::new(32.0, 32.0)).dot(n) > 0.0);
            assert!((n.norm() - 1.0).abs() < 1e-9);
        }
        let sq = resample(&square(10.0), 1.0);
        let normals = outward_normals(&sq);
        let i = sq
            .vertices()
            .iter()
            .position(|v| (v.x - 10.0).abs() < 1e-9 && (v.y - 5.0).abs() < 1e-9)
            .unwrap();
        assert!(normals[i].distance(Point::new(1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn normals_are_unit_on_wobbly_contour() {
        let pts = (0..80)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 80.0;
                let r = 12.0 + 2.0 * (3.0 * t).sin() + 0.7 * (7.0 * t).cos();
                Point::new(30.0 + r * t.cos(), 30.0 + r * t.sin())
            })
            .collect();
        let c = Contour::new(pts).unwrap();
        for n in outward_normals(&c) {
            assert!((n.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn elastic_vanishes_on_straight_runs() {
        let sq = resample(&square(20.0), 1.0);
        let e = elastic_term(&sq);
        for (v, f) in sq.vertices().iter().zip(&e) {
            let near_corner = (v.x < 1.5 || v.x > 18.5) && (v.y < 1.5 || v.y > 18.5);
            if !near_corner {
                assert!(f.norm() < 1e-9, "{v:?} {f:?}");
            }
        }
    }

    #[test]
    fn elastic_equals_curvature_times_inward_normal() {
        for n in [256, 512] {
            let c = circle(10.0, n);
            for (v, f) in c.vertices().iter().zip(elastic_term(&c)) {
                let inward = (Point::new(32.0, 32.0) - *v).normalized();
                let want = inward * 0.1;
                assert!((f - want).norm() < 0.01 * 0.1, "n={n}");
            }
        }
    }

    #[test]
    fn sample_force_interpolates() {
        let fx = crate::grid::ScalarField::from_fn(8, 8, |x, y| (x + 2 * y) as f64).unwrap();
        let f = VectorField::new(fx.clone(), fx).unwrap();
        assert_eq!(sample_force(&f, Point::new(3.0, 2.0)).x, 7.0);
        assert!((sample_force(&f, Point::new(3.5, 2.0)).x - 7.5).abs() < 1e-12);
        // clamped outside
        assert_eq!(sample_force(&f, Point::new(-3.0, 0.0)).x, 0.0);
    }

    #[test]
    fn balloon_only_grows_radius() {
        let c = circle(10.0, 128);
        let f = VectorField::zeros(64, 64).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 0.5,
            gamma: 0.0,
            dt: 1.0,
            ..Default::default()
        };
        let out = snakes_step(&c, &f, &p).unwrap();
        let (_, r) = out.contour.fit_circle();
        assert!((r - 10.5).abs() < 1e-6);
        for v in out.contour.vertices() {
            assert!((v.distance(Point::new(32.0, 32.0)) - 10.5).abs() < 1e-9);
        }
    }

    #[test]
    fn diamond_elastic_step_matches_hand_computation() {
        // diamond (1,0),(0,1),(-1,0),(0,-1) shifted to (5,5); spacing sqrt(2)
        // so ds^2 = 2, and for the vertex (6,5):
        //   C[i-1] + C[i+1] - 2 C[i] = (5,4) + (5,6) - (12,10) = (-2, 0)
        //   elastic = (-1, 0); move = 0.1 * (-1, 0) -> (5.9, 5)
        let c = Contour::new(vec![
            Point::new(6.0, 5.0),
            Point::new(5.0, 6.0),
            Point::new(4.0, 5.0),
            Point::new(5.0, 4.0),
        ])
        .unwrap();
        let f = VectorField::zeros(12, 12).unwrap();
        let p = SnakeParams {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            dt: 0.1,
            ..Default::default()
        };
        let out = snakes_step(&c, &f, &p).unwrap();
        let want = [
            Point::new(5.9, 5.0),
            Point::new(5.0, 5.9),
            Point::new(4.1, 5.0),
            Point::new(5.0, 4.1),
        ];
        for (a, b) in out.contour.vertices().iter().zip(want) {
            assert!(a.distance(b) < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn null_dynamics_leave_contour_unchanged() {
        let c = circle(9.0, 40);
        let f = VectorField::zeros(64, 64).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            dt: 1.0,
            ..Default::default()
        };
        let out = snakes_step(&c, &f, &p).unwrap();
        assert_eq!(out.contour, c);
        assert_eq!(out.max_displacement, 0.0);
        assert_eq!(out.shape_change, 0.0);
    }

    #[test]
    fn vertices_clamp_at_the_border() {
        let c = Contour::circle(Point::new(5.0, 5.0), 4.0, 32).unwrap();
        let f = VectorField::zeros(10, 10).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 2.0,
            gamma: 0.0,
            dt: 1.0,
            ..Default::default()
        };
        let out = snakes_step(&c, &f, &p).unwrap();
        assert!(out.clamped > 0);
        for v in out.contour.vertices() {
            assert!((0.0..=9.0).contains(&v.x) && (0.0..=9.0).contains(&v.y));
        }
    }

    #[test]
    fn elastic_flow_shortens_the_curve() {
        let pts = (0..120)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 120.0;
                let r = 14.0 + 3.0 * (5.0 * t).sin();
                Point::new(32.0 + r * t.cos(), 32.0 + r * t.sin())
            })
            .collect();
        let mut c = Contour::new(pts).unwrap();
        let f = VectorField::zeros(64, 64).unwrap();
        let p = SnakeParams {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            dt: 0.2,
            ..Default::default()
        };
        let mut prev = c.perimeter();
        for _ in 0..200 {
            c = snakes_step(&c, &f, &p).unwrap().contour;
            let cur = c.perimeter();
            assert!(cur <= prev + 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn evolution_stops_at_a_fixed_point() {
        let c = circle(10.0, 64);
        let f = VectorField::zeros(64, 64).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            tol_window: 10,
            resample_every: 0,
            ..Default::default()
        };
        let (out, report) = evolve_snake(&c, &f, &p).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 10);
        assert_eq!(out, c);
    }

    #[test]
    fn report_flags_non_convergence() {
        let c = circle(10.0, 64);
        let f = VectorField::zeros(64, 64).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 0.1,
            gamma: 0.0,
            max_iters: 7,
            ..Default::default()
        };
        let (_, report) = evolve_snake(&c, &f, &p).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 7);
    }

    #[test]
    fn shape_change_ignores_sliding_along_edges() {
        let sq = resample(&square(10.0), 1.0);
        let old = sq.vertices();
        // every vertex slides 0.4 along its own side
        let slid: Vec<Point> = old
            .iter()
            .map(|&v| {
                let d = if v.y == 0.0 && v.x < 10.0 {
                    Point::new(0.4, 0.0)
                } else if v.x == 10.0 && v.y < 10.0 {
                    Point::new(0.0, 0.4)
                } else if v.y == 10.0 && v.x > 0.0 {
                    Point::new(-0.4, 0.0)
                } else {
                    Point::new(0.0, -0.4)
                };
                v + d
            })
            .collect();
        assert!(shape_change(old, &slid) < 1e-12);
        let pushed: Vec<Point> = old.iter().map(|&v| v + Point::new(0.0, 0.25)).collect();
        assert!((shape_change(old, &pushed) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn runaway_contour_is_an_error() {
        let c = Contour::circle(Point::new(2.5, 2.5), 2.0, 64).unwrap();
        let f = VectorField::zeros(6, 6).unwrap();
        let p = SnakeParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            evolve_snake(&c, &f, &p),
            Err(Error::ContourRunaway(64))
        ));
    }
}
