use std::fs;
use std::path::{Path, PathBuf};

use acm_core::bench::{
    self, boundary_error, potential_profile, profile_csv, results_csv, BenchConfig,
    ERROR_SAMPLE_SPACING,
};
use acm_core::forces::{ForceConfig, ForceKind};
use acm_core::grid::{
    load_pgm, save_pgm, synth_circle, synth_t_shape, CircleSpec, GrayImage, PgmFormat, TShapeSpec,
};
use acm_core::levelset;
use acm_core::snakes::{self, Contour, Point};
use serde::Serialize;
use serde_json::json;

use crate::config::{load, FieldConfig, InputSpec, RunConfig, SeedSpec, SolverKind};
use crate::error::CliError;

/// Options shared by every command.
pub struct Common {
    pub config: Option<PathBuf>,
    pub sets: Vec<String>,
    pub out: Option<PathBuf>,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    write(path, text + "\n")
}

fn read_pgm(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(load_pgm(&bytes)?)
}

#[derive(Clone, Copy, Debug)]
pub enum Shape {
    Circle,
    Tshape,
}

pub struct SynthArgs {
    pub shape: Shape,
    pub size: Option<usize>,
    pub radius: Option<f64>,
    pub format: PgmFormat,
}

/// Writes `image.pgm` and `truth.json`.
pub fn synth(args: &SynthArgs, common: &Common) -> Result<(), CliError> {
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let shape = match args.shape {
        Shape::Circle => {
            let mut spec: CircleSpec = load(common.config.as_deref(), &common.sets, &[])?;
            if let Some(n) = args.size {
                spec.width = n;
                spec.height = n;
                spec.center = (n as f64 / 2.0, n as f64 / 2.0);
            }
            if let Some(r) = args.radius {
                spec.radius = r;
            }
            synth_circle(&spec)?
        }
        Shape::Tshape => {
            let mut spec: TShapeSpec = load(common.config.as_deref(), &common.sets, &[])?;
            if let Some(n) = args.size {
                spec.width = n;
                spec.height = n;
            }
            synth_t_shape(&spec)?
        }
    };
    create_dir(&out)?;
    write(&out.join("image.pgm"), save_pgm(&shape.image, args.format))?;
    write(&out.join("truth.json"), shape.truth.to_json() + "\n")
}

/// Writes the edge map, potential and force components as CSV.
pub fn field(image: &Path, common: &Common) -> Result<(), CliError> {
    let cfg: FieldConfig = load(common.config.as_deref(), &common.sets, &["force"])?;
    cfg.validate()?;
    let img = read_pgm(image)?;
    let edge = cfg.edge.apply(&img)?;
    let built = cfg.force.build(&edge)?;
    let potential = built.potential(cfg.iteration)?;
    let force = built.field(cfg.iteration)?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    create_dir(&out)?;
    write(&out.join("edge.csv"), edge.to_csv())?;
    write(&out.join("potential.csv"), potential.to_csv())?;
    write(&out.join("fx.csv"), force.fx.to_csv())?;
    write(&out.join("fy.csv"), force.fy.to_csv())
}

pub struct SegmentArgs {
    pub snapshot_every: Option<usize>,
    pub seed_circle: Option<[f64; 3]>,
}

fn seed_contour(spec: &SeedSpec) -> Result<Contour, CliError> {
    match spec {
        SeedSpec::Circle([cx, cy, r]) => {
            let n = ((std::f64::consts::TAU * r).round() as usize).max(8);
            Ok(Contour::circle(Point::new(*cx, *cy), *r, n)?)
        }
        SeedSpec::Path(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            Ok(Contour::from_json(&text)?)
        }
    }
}

/// Runs the configured solver and writes `contour.json`, `report.json`
/// and optional snapshots. Fails with [`CliError::NotConverged`] after
/// writing when the run did not converge.
pub fn segment(args: &SegmentArgs, common: &Common) -> Result<(), CliError> {
    let mut cfg: RunConfig = load(
        common.config.as_deref(),
        &common.sets,
        &["input", "seed_contour", "force"],
    )?;
    if let Some(out) = &common.out {
        cfg.outputs = out.clone();
    }
    if let Some(c) = args.seed_circle {
        cfg.seed_contour = SeedSpec::Circle(c);
    }
    if args.snapshot_every == Some(0) {
        return Err(CliError::Config("--snapshot-every must be >= 1".into()));
    }
    cfg.validate()?;

    let (image, truth) = match &cfg.input {
        InputSpec::Pgm(p) => (read_pgm(p)?, None),
        InputSpec::Circle(spec) => {
            let s = synth_circle(spec)?;
            (s.image, Some(s.truth))
        }
        InputSpec::Tshape(spec) => {
            let s = synth_t_shape(spec)?;
            (s.image, Some(s.truth))
        }
    };
    let seed = seed_contour(&cfg.seed_contour)?;
    let edge = cfg.edge.apply(&image)?;
    let force = cfg.force.build(&edge)?;
    let level_set = match cfg.solver.kind {
        SolverKind::Gac => Some(levelset::init_from_contour(
            &seed,
            edge.shape(),
            cfg.solver.gac.band_width,
        )?),
        SolverKind::Snakes => None,
    };

    let out = cfg.outputs.clone();
    create_dir(&out)?;
    let snap_dir = out.join("snapshots");
    if args.snapshot_every.is_some() {
        create_dir(&snap_dir)?;
    }
    let mut snap_err = None;
    let mut snapshot = |it: usize, c: &Contour| {
        if let Some(every) = args.snapshot_every {
            if it.is_multiple_of(every) && snap_err.is_none() {
                let path = snap_dir.join(format!("iter_{it:06}.json"));
                if let Err(e) = write(&path, c.to_json() + "\n") {
                    snap_err = Some(e);
                }
            }
        }
    };
    let (contour, report) = match &level_set {
        Some(ls) => levelset::evolve_gac_with(ls, &force, &cfg.solver.gac, |p| {
            snapshot(p.iteration, p.contour)
        })?,
        None => snakes::evolve_snake_with(&seed, &force, &cfg.solver.snakes, &mut snapshot)?,
    };
    if let Some(e) = snap_err {
        return Err(e);
    }

    let error = truth.as_ref().map(|t| {
        let e = boundary_error(&contour, t);
        json!({
            "mean_error": e.mean,
            "max_error": e.max,
            "signed_bias": e.signed_bias,
            "sample_spacing": ERROR_SAMPLE_SPACING,
        })
    });
    write(&out.join("contour.json"), contour.to_json() + "\n")?;
    write_json(
        &out.join("report.json"),
        &json!({
            "solver": cfg.solver.kind,
            "force": cfg.force.kind,
            "report": report,
            "error": error,
            "config": cfg,
        }),
    )?;
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Which {
    Circle,
    Tshape,
    Equivalence,
}

/// Runs one experiment and writes its JSON and CSV reports.
pub fn bench(which: Which, common: &Common) -> Result<(), CliError> {
    let cfg: BenchConfig = load(common.config.as_deref(), &common.sets, &[])?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match which {
        Which::Circle => {
            let results = bench::run_circle_experiment(&cfg.circle)?;
            let shape = synth_circle(&cfg.circle.image)?;
            let edge = cfg.circle.params.edge.apply(&shape.image)?;
            let (cx, cy) = cfg.circle.image.center;
            let end = Point::new((cfg.circle.image.width - 1) as f64, cy);
            let mut profiles = Vec::new();
            for r in &results {
                let p = &cfg.circle.params;
                let fc = match r.method {
                    ForceKind::Electrostatic => ForceConfig::electrostatic(p.electro.clone()),
                    ForceKind::Heat => ForceConfig::heat(p.heat.clone()),
                    ForceKind::United => {
                        ForceConfig::united(p.electro.clone(), p.heat.clone(), p.united.clone())
                    }
                };
                let potential = fc.build(&edge)?.potential(1)?;
                let samples = 4 * (end.x - cx).ceil() as usize + 1;
                profiles.push((
                    r.method,
                    potential_profile(&potential, Point::new(cx, cy), end, samples)?,
                ));
            }
            create_dir(&out)?;
            write_json(
                &out.join("circle.json"),
                &json!({
                    "sample_spacing": ERROR_SAMPLE_SPACING,
                    "config": cfg.circle,
                    "results": results,
                }),
            )?;
            write(&out.join("circle.csv"), results_csv(&results))?;
            for (m, p) in profiles {
                write(
                    &out.join(format!("profile_{}.csv", m.name())),
                    profile_csv(&p),
                )?;
            }
        }
        Which::Tshape => {
            let results = bench::run_tshape_experiment(&cfg.tshape)?;
            create_dir(&out)?;
            write_json(
                &out.join("tshape.json"),
                &json!({
                    "sample_spacing": ERROR_SAMPLE_SPACING,
                    "config": cfg.tshape,
                    "results": results,
                }),
            )?;
            write(&out.join("tshape.csv"), results_csv(&results))?;
        }
        Which::Equivalence => {
            let report = bench::run_equivalence_experiment(&cfg.equivalence)?;
            create_dir(&out)?;
            write_json(
                &out.join("equivalence.json"),
                &json!({ "config": cfg.equivalence, "report": report }),
            )?;
            let mut csv = String::from("metric,value\n");
            for (k, v) in [
                ("snake_rate", report.snake_rate),
                ("gac_rate", report.gac_rate),
                ("expected_rate", report.expected_rate),
                ("max_rate_discrepancy", report.max_rate_discrepancy),
                (
                    "gac_tangential_max_change",
                    report.gac_tangential_max_change,
                ),
                (
                    "snake_tangential_displacement",
                    report.snake_tangential_displacement,
                ),
                (
                    "snake_tangential_expected",
                    report.snake_tangential_expected,
                ),
                (
                    "snake_tangential_radius_drift",
                    report.snake_tangential_radius_drift,
                ),
            ] {
                csv.push_str(&format!("{k},{v}\n"));
            }
            write(&out.join("equivalence.csv"), csv)?;
            let mut radii = String::from("step,snake_radius,gac_radius\n");
            for (i, (s, g)) in report.snake_radii.iter().zip(&report.gac_radii).enumerate() {
                radii.push_str(&format!("{i},{s},{g}\n"));
            }
            write(&out.join("equivalence_radii.csv"), radii)?;
        }
    }
    Ok(())
}
