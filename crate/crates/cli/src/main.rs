//! `acm`: synthetic images, force fields, segmentation runs and benchmarks.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use acm_core::grid::PgmFormat;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Common, SegmentArgs, Shape, SynthArgs, Which};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "acm",
    version,
    about = "Active contour segmentation with electrostatic, heat and united image forces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; keys not given keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set solver.snakes.alpha=0.2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            sets: a.sets,
            out: a.out,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Circle,
    Tshape,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ascii,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchArg {
    Circle,
    Tshape,
    Equivalence,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic image and its ground-truth contour.
    Synth {
        shape: ShapeArg,
        /// Square image side; recenters a circle.
        #[arg(long)]
        size: Option<usize>,
        /// Circle radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the edge map, potential and force field of an image as CSV.
    Field {
        /// PGM image.
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evolve a contour; exits 1 when it does not converge.
    Segment {
        /// Write the contour every N iterations.
        #[arg(long)]
        snapshot_every: Option<usize>,
        /// Seed circle as `cx,cy,r`.
        #[arg(long, value_parser = parse_circle)]
        seed_circle: Option<[f64; 3]>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a benchmark experiment.
    Bench {
        which: BenchArg,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_circle(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [cx, cy, r] if *r > 0.0 => Ok([*cx, *cy, *r]),
        [_, _, _] => Err("radius must be positive".into()),
        _ => Err(format!("expected cx,cy,r, got `{s}`")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth {
            shape,
            size,
            radius,
            format,
            common,
        } => commands::synth(
            &SynthArgs {
                shape: match shape {
                    ShapeArg::Circle => Shape::Circle,
                    ShapeArg::Tshape => Shape::Tshape,
                },
                size,
                radius,
                format: match format {
                    FormatArg::Ascii => PgmFormat::Ascii,
                    FormatArg::Binary => PgmFormat::Binary,
                },
            },
            &common.into(),
        ),
        Command::Field { image, common } => commands::field(&image, &common.into()),
        Command::Segment {
            snapshot_every,
            seed_circle,
            common,
        } => commands::segment(
            &SegmentArgs {
                snapshot_every,
                seed_circle,
            },
            &common.into(),
        ),
        Command::Bench { which, common } => commands::bench(
            match which {
                BenchArg::Circle => Which::Circle,
                BenchArg::Tshape => Which::Tshape,
                BenchArg::Equivalence => Which::Equivalence,
            },
            &common.into(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
