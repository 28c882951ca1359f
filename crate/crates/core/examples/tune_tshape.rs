//! Grid search behind the shipped T-shape parameters.
//!
//! Every method is tuned on its own: among the runs that converge with mean
//! boundary error at most `MAX_MEAN_ERROR`, the one with the fewest
//! iterations wins. Prints every run, then the winners.
//!
//! cargo run --release -p acm-core --example tune_tshape

use acm_core::bench::{MethodParams, TShapeBench};
use acm_core::forces::{ForceKind, HeatParams, UnitedParams};
use acm_core::grid::synth_t_shape;
use acm_core::snakes::{Contour, Point, SnakeParams};
use rayon::prelude::*;

const MAX_MEAN_ERROR: f64 = 2.0;

fn candidates(kind: ForceKind) -> Vec<MethodParams> {
    let mut out = Vec::new();
    for beta in [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        for dt in [0.5, 1.0] {
            let snakes = SnakeParams {
                alpha: 0.1,
                beta,
                gamma: 1.0,
                dt,
                tol: 0.02,
                ..Default::default()
            };
            let steps: &[usize] = match kind {
                ForceKind::Electrostatic => &[400],
                _ => &[50, 100, 200, 400],
            };
            let weights: &[(f64, f64)] = match kind {
                ForceKind::United => &[(1.0, 0.5), (1.0, 1.0), (0.5, 1.0)],
                _ => &[(1.0, 1.0)],
            };
            for &steps in steps {
                for &(gamma_e, gamma_h) in weights {
                    out.push(MethodParams {
                        snakes: snakes.clone(),
                        heat: HeatParams {
                            steps,
                            ..Default::default()
                        },
                        united: UnitedParams { gamma_e, gamma_h },
                        ..Default::default()
                    });
                }
            }
        }
    }
    out
}

fn main() {
    let bench = TShapeBench::default();
    let shape = synth_t_shape(&bench.image).unwrap();
    let (cx, cy) = bench.seed_center;
    let n = ((std::f64::consts::TAU * bench.seed_radius).round() as usize).max(8);
    let seed = Contour::circle(Point::new(cx, cy), bench.seed_radius, n).unwrap();

    for kind in [ForceKind::Electrostatic, ForceKind::Heat, ForceKind::United] {
        let runs: Vec<_> = candidates(kind)
            .into_par_iter()
            .map(|p| {
                let r = p.run(&shape, &seed, kind);
                (p, r)
            })
            .collect();
        let mut best: Option<(usize, &MethodParams)> = None;
        for (p, r) in &runs {
            let s = &p.snakes;
            let tag = format!(
                "{} beta={} dt={} heat_steps={} weights=({}, {})",
                kind.name(),
                s.beta,
                s.dt,
                p.heat.steps,
                p.united.gamma_e,
                p.united.gamma_h
            );
            match r {
                Ok(r) => {
                    println!(
                        "{tag}: iterations {} converged {} mean {:.3} max {:.3}",
                        r.report.iterations, r.report.converged, r.mean_error, r.max_error
                    );
                    let ok = r.report.converged && r.mean_error <= MAX_MEAN_ERROR;
                    if ok && best.is_none_or(|(it, _)| r.report.iterations < it) {
                        best = Some((r.report.iterations, p));
                    }
                }
                Err(e) => println!("{tag}: {e}"),
            }
        }
        match best {
            Some((it, p)) => println!(
                "BEST {}: {it} iterations with {}",
                kind.name(),
                serde_json::to_string(p).unwrap()
            ),
            None => println!("BEST {}: none qualifies", kind.name()),
        }
    }
}
