use serde::{Deserialize, Serialize};

use super::BenchmarkResult;
use crate::error::Result;
use crate::forces::{ElectroParams, ForceConfig, ForceKind, HeatParams, UnitedParams};
use crate::grid::{
    gradient, synth_circle, synth_t_shape, CircleSpec, EdgeParams, ScalarField, SynthShape,
    TShapeSpec, VectorField,
};
use crate::levelset::{self, Advection, GacParams};
use crate::snakes::{self, Contour, Point, SnakeParams};

const METHODS: [ForceKind; 3] = [ForceKind::Electrostatic, ForceKind::Heat, ForceKind::United];

fn seed_circle(center: Point, radius: f64) -> Result<Contour> {
    let n = ((std::f64::consts::TAU * radius).round() as usize).max(8);
    Contour::circle(center, radius, n)
}

fn force_config(
    kind: ForceKind,
    electro: &ElectroParams,
    heat: &HeatParams,
    united: &UnitedParams,
) -> ForceConfig {
    match kind {
        ForceKind::Electrostatic => ForceConfig::electrostatic(electro.clone()),
        ForceKind::Heat => ForceConfig::heat(heat.clone()),
        ForceKind::United => ForceConfig::united(electro.clone(), heat.clone(), united.clone()),
    }
}

/// Shared parameters of a snakes run on a synthetic shape.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    pub edge: EdgeParams,
    pub snakes: SnakeParams,
    pub electro: ElectroParams,
    pub heat: HeatParams,
    pub united: UnitedParams,
}

impl MethodParams {
    /// Evolves `seed` on `shape` under the `kind` force.
    pub fn run(
        &self,
        shape: &SynthShape,
        seed: &Contour,
        kind: ForceKind,
    ) -> Result<BenchmarkResult> {
        let edge = self.edge.apply(&shape.image)?;
        let force = force_config(kind, &self.electro, &self.heat, &self.united).build(&edge)?;
        let (c, report) = snakes::evolve_snake(seed, &force, &self.snakes)?;
        Ok(BenchmarkResult::new(kind, report, c, &shape.truth))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircleBench {
    pub image: CircleSpec,
    /// Radius of the concentric seed contour.
    pub seed_radius: f64,
    pub params: MethodParams,
    /// United weights that must all beat the heat force on mean error.
    pub united_grid: Vec<UnitedParams>,
}

impl Default for CircleBench {
    fn default() -> Self {
        Self {
            image: CircleSpec::default(),
            seed_radius: 25.0,
            params: MethodParams {
                snakes: SnakeParams {
                    alpha: 0.1,
                    beta: 0.0,
                    gamma: 1.0,
                    dt: 0.5,
                    ..Default::default()
                },
                ..Default::default()
            },
            united_grid: vec![
                UnitedParams {
                    gamma_e: 1.0,
                    gamma_h: 0.5,
                },
                UnitedParams {
                    gamma_e: 1.0,
                    gamma_h: 1.0,
                },
                UnitedParams {
                    gamma_e: 0.5,
                    gamma_h: 1.0,
                },
            ],
        }
    }
}

impl CircleBench {
    pub fn run_method(&self, kind: ForceKind) -> Result<BenchmarkResult> {
        let shape = synth_circle(&self.image)?;
        let (cx, cy) = self.image.center;
        let seed = seed_circle(Point::new(cx, cy), self.seed_radius)?;
        self.params.run(&shape, &seed, kind)
    }
}

/// Electrostatic, heat and united snakes on the synthetic circle, seeded
/// with a larger concentric circle.
pub fn run_circle_experiment(cfg: &CircleBench) -> Result<Vec<BenchmarkResult>> {
    METHODS.iter().map(|&k| cfg.run_method(k)).collect()
}

/// Each method carries its own parameters, tuned for the fastest run that
/// converges with mean boundary error at most 2 px.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TShapeBench {
    pub image: TShapeSpec,
    pub seed_center: (f64, f64),
    pub seed_radius: f64,
    pub electrostatic: MethodParams,
    pub heat: MethodParams,
    pub united: MethodParams,
}

fn tshape_snakes(beta: f64, dt: f64) -> SnakeParams {
    SnakeParams {
        alpha: 0.1,
        beta,
        gamma: 1.0,
        dt,
        tol: 0.02,
        ..Default::default()
    }
}

impl Default for TShapeBench {
    fn default() -> Self {
        Self {
            image: TShapeSpec::default(),
            seed_center: (64.0, 90.0),
            seed_radius: 5.0,
            electrostatic: MethodParams {
                snakes: tshape_snakes(0.4, 0.5),
                ..Default::default()
            },
            heat: MethodParams {
                snakes: tshape_snakes(0.0, 1.0),
                heat: HeatParams {
                    steps: 200,
                    ..Default::default()
                },
                ..Default::default()
            },
            united: MethodParams {
                snakes: tshape_snakes(0.0, 1.0),
                united: UnitedParams {
                    gamma_e: 0.5,
                    gamma_h: 1.0,
                },
                ..Default::default()
            },
        }
    }
}

impl TShapeBench {
    pub fn params(&self, kind: ForceKind) -> &MethodParams {
        match kind {
            ForceKind::Electrostatic => &self.electrostatic,
            ForceKind::Heat => &self.heat,
            ForceKind::United => &self.united,
        }
    }

    pub fn run_method(&self, kind: ForceKind) -> Result<BenchmarkResult> {
        let shape = synth_t_shape(&self.image)?;
        let seed = seed_circle(
            Point::new(self.seed_center.0, self.seed_center.1),
            self.seed_radius,
        )?;
        self.params(kind).run(&shape, &seed, kind)
    }
}

/// The three methods grown from the same small seed inside the stem of the
/// T. Runs are sequential so their wall times do not interfere.
pub fn run_tshape_experiment(cfg: &TShapeBench) -> Result<Vec<BenchmarkResult>> {
    METHODS.iter().map(|&k| cfg.run_method(k)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceBench {
    pub size: usize,
    pub radius: f64,
    pub beta: f64,
    pub dt: f64,
    pub steps: usize,
    pub tangential_gamma: f64,
    pub tangential_dt: f64,
    pub tangential_steps: usize,
    pub band_width: f64,
}

impl Default for EquivalenceBench {
    fn default() -> Self {
        Self {
            size: 64,
            radius: 10.0,
            beta: 0.1,
            dt: 0.5,
            steps: 50,
            tangential_gamma: 1.0,
            tangential_dt: 0.1,
            tangential_steps: 10,
            band_width: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Fitted radius after each balloon step, starting with the seed.
    pub snake_radii: Vec<f64>,
    pub gac_radii: Vec<f64>,
    /// Radius growth per unit time over the whole run.
    pub snake_rate: f64,
    pub gac_rate: f64,
    /// The analytic rate, `beta`.
    pub expected_rate: f64,
    /// Largest relative gap among the two measured rates and `beta`.
    pub max_rate_discrepancy: f64,
    /// Largest `|phi change|` on the band in any tangential step.
    pub gac_tangential_max_change: f64,
    /// Mean per-step vertex displacement under the tangential field.
    pub snake_tangential_displacement: f64,
    /// `gamma * dt` for the tangential run.
    pub snake_tangential_expected: f64,
    /// Largest per-step change of the fitted radius under the tangential field.
    pub snake_tangential_radius_drift: f64,
}

/// Balloon growth of the same circle under both solvers, and the response
/// of each to a purely tangential force.
pub fn run_equivalence_experiment(cfg: &EquivalenceBench) -> Result<EquivalenceReport> {
    let n = cfg.size;
    let c = n as f64 / 2.0;
    let center = Point::new(c, c);
    let seed = seed_circle(center, cfg.radius)?;
    let still = VectorField::zeros(n, n)?;

    let sp = SnakeParams {
        alpha: 0.0,
        beta: cfg.beta,
        gamma: 0.0,
        dt: cfg.dt,
        ..Default::default()
    };
    let mut snake_radii = vec![seed.fit_circle().1];
    let mut s = seed.clone();
    for it in 1..=cfg.steps {
        s = snakes::snakes_step(&s, &still, &sp)?.contour;
        if sp.resample_every > 0 && it % sp.resample_every == 0 {
            s = snakes::resample(&s, sp.resample_spacing);
        }
        snake_radii.push(s.fit_circle().1);
    }

    let gp = GacParams {
        alpha: 0.0,
        beta: cfg.beta,
        gamma: 0.0,
        dt: cfg.dt,
        band_width: cfg.band_width,
        ..Default::default()
    };
    let mut ls = levelset::init_from_contour(&seed, (n, n), cfg.band_width)?;
    let mut gac_radii = vec![levelset::extract_zero_contour(&ls)?.fit_circle().1];
    let (_, report) = levelset::evolve_gac_with(
        &ls,
        &still,
        &GacParams {
            max_iters: cfg.steps,
            tol: 0.0,
            ..gp.clone()
        },
        |p| gac_radii.push(p.contour.fit_circle().1),
    )?;
    debug_assert_eq!(report.iterations, cfg.steps);

    let time = cfg.steps as f64 * cfg.dt;
    let snake_rate = (snake_radii[cfg.steps] - snake_radii[0]) / time;
    let gac_rate = (gac_radii[cfg.steps] - gac_radii[0]) / time;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let max_rate_discrepancy = rel(snake_rate, cfg.beta)
        .max(rel(gac_rate, cfg.beta))
        .max(rel(snake_rate, gac_rate));

    // tangential field for the level set: grad(phi) turned a quarter turn
    let tp = GacParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: cfg.tangential_gamma,
        dt: cfg.tangential_dt,
        use_sign_scheme: false,
        advection: Advection::Central,
        band_width: cfg.band_width,
        ..Default::default()
    };
    ls = levelset::init_from_contour(&seed, (n, n), cfg.band_width)?;
    let g = gradient(ls.phi());
    let turned = VectorField::new(g.fy.map(|v| -v), g.fx.clone())?;
    let mut gac_tangential_max_change: f64 = 0.0;
    for _ in 0..cfg.tangential_steps {
        let next = levelset::gac_step(&ls, &turned, &tp);
        for &i in ls.band() {
            let d = (next.phi().values()[i] - ls.phi().values()[i]).abs();
            gac_tangential_max_change = gac_tangential_max_change.max(d);
        }
        ls = next;
    }

    // rigid rotation with unit speed on the seed circle; linear, so
    // bilinear sampling reproduces it exactly
    let omega = 1.0 / cfg.radius;
    let rotation = VectorField::new(
        ScalarField::from_fn(n, n, |_, y| -(y as f64 - c) * omega)?,
        ScalarField::from_fn(n, n, |x, _| (x as f64 - c) * omega)?,
    )?;
    let rp = SnakeParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: cfg.tangential_gamma,
        dt: cfg.tangential_dt,
        ..Default::default()
    };
    let mut s = seed;
    let mut displacement = 0.0;
    let mut drift: f64 = 0.0;
    for _ in 0..cfg.tangential_steps {
        let out = snakes::snakes_step(&s, &rotation, &rp)?;
        displacement += out.mean_displacement;
        drift = drift.max((out.contour.fit_circle().1 - s.fit_circle().1).abs());
        s = out.contour;
    }

    Ok(EquivalenceReport {
        snake_radii,
        gac_radii,
        snake_rate,
        gac_rate,
        expected_rate: cfg.beta,
        max_rate_discrepancy,
        gac_tangential_max_change,
        snake_tangential_displacement: displacement / cfg.tangential_steps.max(1) as f64,
        snake_tangential_expected: cfg.tangential_gamma * cfg.tangential_dt,
        snake_tangential_radius_drift: drift,
    })
}

/// All experiment settings; the shipped defaults are the tuned values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub circle: CircleBench,
    pub tshape: TShapeBench,
    pub equivalence: EquivalenceBench,
}
