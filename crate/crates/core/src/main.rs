//! Command-line front end: builds maps, runs the estimator battery, and
//! serializes every report as CSV/JSON/SVG plus a run manifest.
//!
//! Exit codes: 0 success, 2 usage, 3 data/invariant failure, 4 coverage
//! verification failure, 5 depth cap exceeded.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pwadyn::entropy::{entropy_report, paper_cover_with_cap, Method};
use pwadyn::orbit::{attractor_profile, lyapunov_estimate, orbit, sample_points};
use pwadyn::pwa::{build_rhombus, load_map, map_hash, PiecewiseMap};
use pwadyn::rational::{format_rational, parse_rational, Rational};
use pwadyn::report::{
    attractor_csv, cells_csv, contrast_csv, contrast_json, cover_csv, cover_svg, entropy_csv,
    entropy_json, info_json, lyapunov_csv, orbit_csv, orbit_svg, partition_svg, side_by_side_svg,
    RunManifest,
};
use pwadyn::symbolic::{
    cell_counts_with_cap, refine_partition_with_cap, DEFAULT_DEPTH_CAP,
};
use pwadyn::{Error, RatPoint};

fn rational_flag(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| format!("{e} (rationals are written like \"-1/2\")"))
}

#[derive(Parser)]
#[command(name = "pwadyn", version, about = "Piecewise affine maps, exact partitions, and entropy estimators")]
struct Cli {
    /// Worker threads for the parallel estimator passes (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the run manifest to this path instead of the default location.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MapSource {
    /// Rhombus family parameter t in (0,1), e.g. "1/2".
    #[arg(long, value_parser = rational_flag)]
    t: Option<Rational>,

    /// JSON map document (alternative to --t).
    #[arg(long, conflicts_with = "t")]
    map: Option<PathBuf>,
}

impl MapSource {
    fn build(&self) -> Result<(PiecewiseMap, Value), Error> {
        match (&self.t, &self.map) {
            (Some(t), None) => Ok((
                build_rhombus(t)?,
                json!({ "t": format_rational(t) }),
            )),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::SchemaError(format!("cannot read {}: {e}", path.display())))?;
                Ok((load_map(&text)?, json!({ "map": path.display().to_string() })))
            }
            _ => Err(Error::ParameterOutOfRange(
                "exactly one of --t or --map is required".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact piece matrices, norms, and the contraction verdict.
    Info {
        #[command(flatten)]
        source: MapSource,
        /// Also write the JSON report here ("-" for stdout).
        #[arg(long)]
        json: Option<String>,
    },
    /// Refined-partition cell counts per depth [CSV: n,count,rate].
    Cells {
        #[command(flatten)]
        source: MapSource,
        #[arg(long = "n-max")]
        n_max: usize,
        /// Refinement depth cap.
        #[arg(long = "depth-cap", default_value_t = DEFAULT_DEPTH_CAP)]
        depth_cap: usize,
        /// CSV output path ("-" for stdout).
        #[arg(long)]
        csv: Option<String>,
        /// SVG rendering of the depth n-max partition.
        #[arg(long)]
        svg: Option<String>,
    },
    /// Entropy rates from the selected estimators [CSV: method,n,count,rate,residual].
    Entropy {
        #[command(flatten)]
        source: MapSource,
        #[arg(long = "n-max")]
        n_max: usize,
        /// Bowen ball radius for the grid estimators.
        #[arg(long, value_parser = rational_flag, default_value = "1/2")]
        eps: Rational,
        /// Candidate grid pitch.
        #[arg(long, value_parser = rational_flag, default_value = "1/64")]
        mesh: Rational,
        /// Comma-separated subset of cells,transition,spanning,separated.
        #[arg(long, default_value = "cells,transition")]
        methods: String,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        json: Option<String>,
    },
    /// Exact orbit of a starting point [CSV: step,x,y,piece].
    Orbit {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, value_parser = rational_flag, allow_hyphen_values = true)]
        y: Rational,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Lyapunov norm-growth estimates over seeded sample orbits [CSV: sample,n,value,bound].
    Lyapunov {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Worst distance to the attractor {A,B} per step [CSV: step,max_dist].
    Attractor {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Explicit dyadic-triangle cover, spanning verified on a mesh-1/128 grid
    /// [CSV: n,centers,max_radius,verified].
    Cover {
        /// Rhombus family parameter t in (0,1).
        #[arg(long, value_parser = rational_flag)]
        t: Rational,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_flag, default_value = "1/2")]
        eps: Rational,
        /// Centers placed on each triangle median.
        #[arg(long = "per-triangle", default_value_t = 2)]
        per_triangle: usize,
        #[arg(long = "depth-cap", default_value_t = DEFAULT_DEPTH_CAP)]
        depth_cap: usize,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Conformal-contraction contrast report (zero rate vs log 2).
    Contrast {
        #[arg(long)]
        depth: usize,
        #[arg(long = "depth-cap", default_value_t = DEFAULT_DEPTH_CAP)]
        depth_cap: usize,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        json: Option<String>,
        #[arg(long)]
        svg: Option<String>,
    },
}

struct Outputs {
    files: Vec<String>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn write(&mut self, target: &Option<String>, content: &str) -> Result<(), Error> {
        let Some(target) = target else { return Ok(()) };
        if target == "-" {
            print!("{content}");
        } else {
            std::fs::write(target, content)
                .map_err(|e| Error::SchemaError(format!("cannot write {target}: {e}")))?;
            self.files.push(target.clone());
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<(RunManifest, Outputs), Error> {
    let started = Instant::now();
    let mut outputs = Outputs::new();
    let (command, params, input_map_hash) = match &cli.command {
        Command::Info { source, json: json_out } => {
            let (m, src) = source.build()?;
            let doc = info_json(&m);
            let lip = m
                .lipschitz_exact()
                .map(|l| format_rational(&l))
                .unwrap_or_else(|| format!("{:.6}", m.lipschitz_float()));
            println!("metric: {}", m.metric().name());
            println!("lipschitz: {lip}");
            println!(
                "verdict: {}",
                if m.lipschitz_float() < 1.0 { "strict" } else { "non-strict" }
            );
            for piece in doc["pieces"].as_array().unwrap() {
                println!(
                    "piece {}: linear {} offset {} | l1 {} linf {} sigma_max {} conformal {}",
                    piece["label"], piece["linear"], piece["offset"], piece["norm_l1"],
                    piece["norm_linf"], piece["sigma_max"], piece["conformal"]
                );
            }
            let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
            outputs.write(json_out, &text)?;
            ("info", json!({ "source": src }), Some(map_hash(&m)))
        }
        Command::Cells { source, n_max, depth_cap, csv, svg } => {
            let (m, src) = source.build()?;
            let counts = cell_counts_with_cap(&m, *n_max, *depth_cap)?;
            outputs.write(csv, &cells_csv(&counts))?;
            if svg.is_some() {
                let part = refine_partition_with_cap(&m, *n_max, *depth_cap)?;
                outputs.write(svg, &partition_svg(&m, &part))?;
            }
            if csv.is_none() && svg.is_none() {
                print!("{}", cells_csv(&counts));
            }
            (
                "cells",
                json!({ "source": src, "n_max": n_max, "depth_cap": depth_cap }),
                Some(map_hash(&m)),
            )
        }
        Command::Entropy { source, n_max, eps, mesh, methods, csv, json: json_out } => {
            let (m, src) = source.build()?;
            let methods = methods
                .split(',')
                .map(|s| Method::parse(s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let report = entropy_report(&m, *n_max, eps, mesh, &methods)?;
            let csv_text = entropy_csv(&report);
            outputs.write(csv, &csv_text)?;
            let json_text = serde_json::to_string_pretty(&entropy_json(&report)).unwrap() + "\n";
            outputs.write(json_out, &json_text)?;
            if csv.is_none() && json_out.is_none() {
                print!("{csv_text}");
            }
            (
                "entropy",
                json!({
                    "source": src, "n_max": n_max,
                    "eps": format_rational(eps), "mesh": format_rational(mesh),
                    "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
                }),
                Some(map_hash(&m)),
            )
        }
        Command::Orbit { source, x, y, steps, csv, svg } => {
            let (m, src) = source.build()?;
            let o = orbit(&m, &RatPoint::new(x.clone(), y.clone()), *steps);
            let text = orbit_csv(&m, &o);
            outputs.write(csv, &text)?;
            outputs.write(svg, &orbit_svg(&m, &o))?;
            if csv.is_none() && svg.is_none() {
                print!("{text}");
            }
            (
                "orbit",
                json!({
                    "source": src, "x": format_rational(x), "y": format_rational(y),
                    "steps": steps,
                }),
                Some(map_hash(&m)),
            )
        }
        Command::Lyapunov { source, samples, steps, seed, csv } => {
            let (m, src) = source.build()?;
            let starts = sample_points(&m, *samples, *seed);
            let mut rows = Vec::new();
            for (i, start) in starts.iter().enumerate() {
                match lyapunov_estimate(&m, start, *steps) {
                    Ok(est) => rows.push((i, est)),
                    Err(Error::OrbitTruncated { .. }) => {} // reported via row count
                    Err(e) => return Err(e),
                }
            }
            let text = lyapunov_csv(&rows);
            outputs.write(csv, &text)?;
            if csv.is_none() {
                print!("{text}");
            }
            (
                "lyapunov",
                json!({ "source": src, "samples": samples, "steps": steps, "seed": seed }),
                Some(map_hash(&m)),
            )
        }
        Command::Attractor { source, samples, steps, seed, csv } => {
            let (m, src) = source.build()?;
            let profile = attractor_profile(&m, *samples, *steps, *seed);
            let text = attractor_csv(&profile);
            outputs.write(csv, &text)?;
            if csv.is_none() {
                print!("{text}");
            }
            (
                "attractor",
                json!({ "source": src, "samples": samples, "steps": steps, "seed": seed }),
                Some(map_hash(&m)),
            )
        }
        Command::Cover { t, n, eps, per_triangle, depth_cap, csv, svg } => {
            let est = paper_cover_with_cap(t, *n, eps, *per_triangle, *depth_cap)?;
            let text = cover_csv(&est);
            outputs.write(csv, &text)?;
            if svg.is_some() {
                let m = build_rhombus(t)?;
                let part = refine_partition_with_cap(&m, *n, *depth_cap)?;
                outputs.write(svg, &cover_svg(&m, &part, &est.centers))?;
            }
            if csv.is_none() && svg.is_none() {
                print!("{text}");
            }
            let m = build_rhombus(t)?;
            (
                "cover",
                json!({
                    "t": format_rational(t), "n": n, "eps": format_rational(eps),
                    "per_triangle": per_triangle, "depth_cap": depth_cap,
                }),
                Some(map_hash(&m)),
            )
        }
        Command::Contrast { depth, depth_cap, csv, json: json_out, svg } => {
            let report = pwadyn::conformal::run_contrast_with_cap(*depth, *depth_cap)?;
            let text = contrast_csv(&report);
            outputs.write(csv, &text)?;
            let json_text = serde_json::to_string_pretty(&contrast_json(&report)).unwrap() + "\n";
            outputs.write(json_out, &json_text)?;
            if svg.is_some() {
                let render_depth = (*depth).min(6);
                let conformal = pwadyn::conformal::builtin_conformal_map()?;
                let rhombus = build_rhombus(&pwadyn::rat(1, 2))?;
                let pc = refine_partition_with_cap(&conformal, render_depth, *depth_cap)?;
                let pr = refine_partition_with_cap(&rhombus, render_depth, *depth_cap)?;
                outputs.write(svg, &side_by_side_svg((&conformal, &pc), (&rhombus, &pr)))?;
            }
            if csv.is_none() && json_out.is_none() && svg.is_none() {
                print!("{text}");
            }
            (
                "contrast",
                json!({ "depth": depth, "depth_cap": depth_cap }),
                None,
            )
        }
    };
    let manifest = RunManifest {
        tool_version: pwadyn::VERSION.to_string(),
        command: command.to_string(),
        params,
        wall_clock_ms: started.elapsed().as_millis(),
        input_map_hash,
        outputs: outputs.files.clone(),
    };
    Ok((manifest, outputs))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ParameterOutOfRange(_) => 2,
        Error::CoverageFailure { .. } => 4,
        Error::DepthCapExceeded { .. } => 5,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok((manifest, outputs)) => {
            let text = manifest.to_json() + "\n";
            match &cli.manifest {
                Some(path) => {
                    if std::fs::write(path, &text).is_err() {
                        eprintln!("warning: cannot write manifest to {}", path.display());
                    }
                }
                None => {
                    if let Some(first) = outputs.files.first() {
                        let path = format!("{first}.manifest.json");
                        if std::fs::write(&path, &text).is_err() {
                            eprintln!("warning: cannot write manifest to {path}");
                        }
                    } else {
                        eprint!("{text}");
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
