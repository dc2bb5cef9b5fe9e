//! `covpack`: run coverage experiments from config files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use covpack::config::{generate_polygon, PolygonSpec, RunConfig, Shape};
use covpack::metrics::{RunReport, RunStatus};
use covpack::pipeline::run_pipeline;
use covpack::svg::{render_report, write_svg, SvgOptions};
use covpack::Error;

const EXIT_OK: u8 = 0;
const EXIT_NON_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "covpack", version, about = "Cover a convex polygon with n congruent circles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of Monte Carlo samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file (run, render, gen-polygon) or directory (batch).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write an SVG; a directory for batch.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Draw the clipped Voronoi cells in SVG output.
    #[arg(long, global = true)]
    voronoi: bool,
    /// Print nothing but errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the pipeline on one config file (TOML, or JSON by extension).
    Run { config: PathBuf },
    /// Run every *.toml and *.json config in a directory.
    Batch { dir: PathBuf },
    /// Draw a saved run report as SVG.
    Render { report: PathBuf },
    /// Print polygon vertices as JSON. SPEC is `rectangle:W,H`,
    /// `ngon:K,R`, `random:COUNT,SEED[,SIZE]` or a TOML/JSON polygon file.
    GenPolygon { spec: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &cli.common),
        Command::Batch { dir } => cmd_batch(dir, &cli.common),
        Command::Render { report } => cmd_render(report, &cli.common),
        Command::GenPolygon { spec } => cmd_gen_polygon(spec, &cli.common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(path: &Path, common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = common.samples {
        cfg.estimator.samples = Some(samples);
    }
    Ok(cfg)
}

fn svg_options(common: &Common) -> SvgOptions {
    SvgOptions {
        voronoi: common.voronoi,
        ..SvgOptions::default()
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn status_code(report: &RunReport) -> u8 {
    match report.status {
        RunStatus::Converged => EXIT_OK,
        RunStatus::NonConvergence => EXIT_NON_CONVERGENCE,
    }
}

fn summary(name: &str, r: &RunReport) -> String {
    format!(
        "{name}: status={:?} coverage={:.4} usage={:.4} min_gap={} {:.0} ms",
        r.status,
        r.coverage_rate,
        r.usage_rate,
        r.min_gap.map_or("-".to_string(), |g| format!("{g:.4}")),
        r.wall_time_ms
    )
}

fn cmd_run(path: &Path, common: &Common) -> Result<u8, Error> {
    let cfg = load_config(path, common)?;
    let report = run_pipeline(&cfg)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let out = common.out.as_deref().or(cfg.output.report.as_deref());
    write_text(out, &json)?;
    if let Some(svg_path) = common.svg.as_deref().or(cfg.output.svg.as_deref()) {
        write_svg(svg_path, &render_report(&report, &svg_options(common))?)?;
    }
    if !common.quiet && out.is_some() {
        eprintln!("{}", summary(&path.display().to_string(), &report));
    }
    Ok(status_code(&report))
}

fn config_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
        if p.is_file() && (ext.eq_ignore_ascii_case("toml") || ext.eq_ignore_ascii_case("json")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Worst outcome first: IO, then invalid input, then non-convergence.
fn severity(code: u8) -> u8 {
    match code {
        EXIT_IO => 3,
        2 => 2,
        EXIT_NON_CONVERGENCE => 1,
        _ => 0,
    }
}

fn cmd_batch(dir: &Path, common: &Common) -> Result<u8, Error> {
    let files = config_files(dir)?;
    let out_dir = common.out.clone().unwrap_or_else(|| dir.to_path_buf());
    std::fs::create_dir_all(&out_dir)?;
    if let Some(svg_dir) = &common.svg {
        std::fs::create_dir_all(svg_dir)?;
    }
    let codes: Vec<u8> = files
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
            let run = || -> Result<RunReport, Error> {
                let cfg = load_config(path, common)?;
                let report = run_pipeline(&cfg)?;
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(out_dir.join(format!("{stem}.report.json")), json)?;
                if let Some(svg_dir) = &common.svg {
                    let svg = render_report(&report, &svg_options(common))?;
                    write_svg(&svg_dir.join(format!("{stem}.svg")), &svg)?;
                }
                Ok(report)
            };
            match run() {
                Ok(report) => {
                    if !common.quiet {
                        eprintln!("{}", summary(&path.display().to_string(), &report));
                    }
                    status_code(&report)
                }
                Err(e) => {
                    eprintln!("{}: error: {e}", path.display());
                    e.exit_code() as u8
                }
            }
        })
        .collect();
    if files.is_empty() && !common.quiet {
        eprintln!("no config files in {}", dir.display());
    }
    Ok(codes.into_iter().max_by_key(|&c| severity(c)).unwrap_or(EXIT_OK))
}

fn cmd_render(path: &Path, common: &Common) -> Result<u8, Error> {
    let text = std::fs::read_to_string(path)?;
    let report: RunReport =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let svg = render_report(&report, &svg_options(common))?;
    let out = common.out.as_deref().or(common.svg.as_deref());
    match out {
        Some(p) => write_svg(p, &svg)?,
        None => print!("{svg}"),
    }
    Ok(EXIT_OK)
}

fn cmd_gen_polygon(spec: &str, common: &Common) -> Result<u8, Error> {
    let as_path = Path::new(spec);
    let mut poly_spec = if as_path.is_file() {
        let text = std::fs::read_to_string(as_path)?;
        let is_json = as_path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str::<PolygonSpec>(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str::<PolygonSpec>(&text).map_err(|e| Error::Config(e.to_string()))?
        }
    } else {
        PolygonSpec::parse_compact(spec)?
    };
    if let (Some(s), Shape::RandomConvex { seed, .. }) = (common.seed, &mut poly_spec.shape) {
        *seed = s;
    }
    let poly = generate_polygon(&poly_spec)?;
    let verts: Vec<[f64; 2]> = poly.vertices().iter().map(|p| [p.x, p.y]).collect();
    let json = serde_json::to_string_pretty(&verts).expect("vertices serialize");
    write_text(common.out.as_deref(), &json)?;
    if let Some(svg_path) = &common.svg {
        let empty = covpack::CircleConfiguration {
            centers: Vec::new(),
            radius: 1.0,
        };
        let svg = covpack::svg::render_svg(&poly, &empty, None, &svg_options(common));
        write_svg(svg_path, &svg)?;
    }
    Ok(EXIT_OK)
}
