//! Command-line front end: `segment`, `compare` and `bench`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::{load_ppm, reconstruct_quantized, to_dataset, write_ppm};
use crate::metrics::{aggregate_bench, bench_run, build_report, ComparisonReport};
use crate::model::{validate_config, ClusterConfig, PixelDataset};
use crate::pipeline::{Algorithm, SegmentationResult};
use crate::swarm::SwarmConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Upper bound on the number of seeds one bench invocation may expand to.
pub const MAX_SEEDS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(name = "apsof", version, about = "Color image segmentation with swarm-seeded fuzzy c-means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment one image with one algorithm and write the quantized result.
    Segment {
        #[arg(long, default_value = "apsof", value_parser = parse_algorithm)]
        algo: Algorithm,
        #[command(flatten)]
        opts: RunOptions,
        input: PathBuf,
        output: PathBuf,
    },
    /// Run all four algorithms on one image and report normalized objectives.
    Compare {
        #[command(flatten)]
        opts: RunOptions,
        input: PathBuf,
        /// Directory receiving `<algo>.ppm` and, without --report, `report.json`.
        out_dir: PathBuf,
    },
    /// Repeat the comparison over many seeds and images and aggregate.
    Bench {
        /// Comma-separated seeds or inclusive ranges, e.g. `1-20` or `1,5,9-12`.
        /// Defaults to the single --seed value.
        #[arg(long, value_parser = parse_seed_list)]
        seeds: Option<std::vec::Vec<u64>>,
        #[command(flatten)]
        opts: RunOptions,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub clusters: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_fuzzifier)]
    pub fuzzifier: f64,
    /// Box-downscale so the longer image side is at most this many pixels.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_side: Option<u32>,
    #[arg(long)]
    pub swarm_size: Option<usize>,
    /// Maximum swarm iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub w_max: Option<f64>,
    #[arg(long)]
    pub w_min: Option<f64>,
    #[arg(long)]
    pub c1_init: Option<f64>,
    #[arg(long)]
    pub c1_final: Option<f64>,
    #[arg(long)]
    pub c2_init: Option<f64>,
    #[arg(long)]
    pub c2_final: Option<f64>,
    #[arg(long)]
    pub variance_tol: Option<f64>,
    #[arg(long = "vmax-frac")]
    pub vmax_frac: Option<f64>,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl RunOptions {
    pub fn cluster_config(&self) -> ClusterConfig {
        ClusterConfig {
            clusters: self.clusters as usize,
            fuzzifier: self.fuzzifier,
            seed: self.seed,
            ..ClusterConfig::default()
        }
    }

    pub fn swarm_config(&self) -> Result<SwarmConfig> {
        let d = SwarmConfig::default();
        let s = SwarmConfig {
            swarm_size: self.swarm_size.unwrap_or(d.swarm_size),
            n_max: self.iters.unwrap_or(d.n_max),
            w_max: self.w_max.unwrap_or(d.w_max),
            w_min: self.w_min.unwrap_or(d.w_min),
            c1_init: self.c1_init.unwrap_or(d.c1_init),
            c1_final: self.c1_final.unwrap_or(d.c1_final),
            c2_init: self.c2_init.unwrap_or(d.c2_init),
            c2_final: self.c2_final.unwrap_or(d.c2_final),
            variance_tol: self.variance_tol.unwrap_or(d.variance_tol),
            v_max_fraction: self.vmax_frac.unwrap_or(d.v_max_fraction),
            ..d
        };
        s.validate()?;
        Ok(s)
    }
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_fuzzifier(s: &str) -> std::result::Result<f64, String> {
    let m: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if m > 1.0 && m.is_finite() {
        Ok(m)
    } else {
        Err(format!("fuzzifier must be a finite number greater than 1, got {s}"))
    }
}

/// Parses `1,4,7-9` style seed lists. Ranges are inclusive; duplicates are
/// kept in the order given.
pub fn parse_seed_list(s: &str) -> std::result::Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty entry in seed list".into());
        }
        let (lo, hi) = match item.split_once('-') {
            Some((a, b)) => (parse_seed(a)?, parse_seed(b)?),
            None => {
                let v = parse_seed(item)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("descending seed range `{item}`"));
        }
        let count = (hi - lo).saturating_add(1);
        if count > (MAX_SEEDS - seeds.len()) as u64 {
            return Err(format!("seed list expands to more than {MAX_SEEDS} seeds"));
        }
        seeds.extend(lo..=hi);
    }
    Ok(seeds)
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{s}` is not a seed"));
    }
    s.parse().map_err(|_| format!("seed `{s}` out of range"))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidSwarmConfig(_)
                | Error::InvalidFuzzifier(_)
                | Error::InvalidClusterCount => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Segment { algo, opts, input, output } => cmd_segment(algo, &opts, &input, &output),
        Command::Compare { opts, input, out_dir } => cmd_compare(&opts, &input, &out_dir),
        Command::Bench { seeds, opts, inputs } => {
            cmd_bench(&seeds.unwrap_or_else(|| vec![opts.seed]), &opts, &inputs)
        }
    }
}

fn load_dataset(path: &Path, max_side: Option<u32>) -> Result<PixelDataset> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let image = load_ppm(&bytes)?;
    to_dataset(&image, max_side.map(|s| s as usize))
}

fn image_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_quantized(path: &Path, dataset: &PixelDataset, result: &SegmentationResult) -> Result<()> {
    let image = reconstruct_quantized(dataset, &result.labels, &result.centers)?;
    fs::write(path, write_ppm(&image))?;
    Ok(())
}

pub fn cmd_segment(algo: Algorithm, opts: &RunOptions, input: &Path, output: &Path) -> Result<()> {
    let sconfig = opts.swarm_config()?;
    let dataset = load_dataset(input, opts.max_side)?;
    let config = validate_config(opts.cluster_config(), &dataset)?;
    let result = algo.run(&dataset, &config, &sconfig)?;
    write_quantized(output, &dataset, &result)?;
    if let Some(path) = &opts.report {
        let report = build_report(&image_id(input), &dataset, config.fuzzifier, &[result], &[])?;
        fs::write(path, report.to_json())?;
    }
    Ok(())
}

fn compare_dataset(
    id: &str,
    dataset: &PixelDataset,
    config: &ClusterConfig,
    sconfig: &SwarmConfig,
) -> Result<(Vec<SegmentationResult>, ComparisonReport)> {
    let config = validate_config(config.clone(), dataset)?;
    let results = Algorithm::ALL
        .iter()
        .map(|a| a.run(dataset, &config, sconfig))
        .collect::<Result<Vec<_>>>()?;
    let report = build_report(id, dataset, config.fuzzifier, &results, &[(Algorithm::Fcm, Algorithm::Apsof)])?;
    Ok((results, report))
}

pub fn cmd_compare(opts: &RunOptions, input: &Path, out_dir: &Path) -> Result<()> {
    let sconfig = opts.swarm_config()?;
    let dataset = load_dataset(input, opts.max_side)?;
    let (results, report) = compare_dataset(&image_id(input), &dataset, &opts.cluster_config(), &sconfig)?;
    fs::create_dir_all(out_dir)?;
    for r in &results {
        write_quantized(&out_dir.join(format!("{}.ppm", r.algorithm)), &dataset, r)?;
    }
    let report_path = opts.report.clone().unwrap_or_else(|| out_dir.join("report.json"));
    fs::write(report_path, report.to_json())?;
    Ok(())
}

pub fn cmd_bench(seeds: &[u64], opts: &RunOptions, inputs: &[PathBuf]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("bench needs at least one seed".into()));
    }
    let sconfig = opts.swarm_config()?;
    let datasets = inputs
        .iter()
        .map(|p| Ok((image_id(p), load_dataset(p, opts.max_side)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> =
        (0..datasets.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let (id, dataset) = &datasets[i];
            let config = opts.cluster_config().with_seed(seed);
            compare_dataset(id, dataset, &config, &sconfig).map(|(_, report)| bench_run(&report))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = aggregate_bench(
        datasets.iter().map(|(id, _)| id.clone()).collect(),
        seeds.to_vec(),
        opts.clusters as usize,
        runs,
    );
    match &opts.report {
        Some(path) => fs::write(path, report.to_json())?,
        None => println!("{}", report.to_json()),
    }
    Ok(())
}
