//! Command-line front end: binds a resolved configuration to the library
//! pipelines and writes grid files, measurement batches, and CSV summaries.
//!
//! Exit codes: 0 success, 2 malformed configuration (the diagnostic names
//! the offending key), 3 I/O failure, 1 any other pipeline error.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use fdmimo_ce::bench::{
    dict_cdf_experiment, sweep_pilots, sweep_snr, write_cdf_csv, write_sweep_csv,
};
use fdmimo_ce::channel::{sample_paths, ChannelRealization};
use fdmimo_ce::config::{EstimatorKind, ExperimentConfig, Preset};
use fdmimo_ce::dictionary::write_grid_text;
use fdmimo_ce::estimators::{bsomp, omp_with_mode, swomp, BsompOptions, StopRule};
use fdmimo_ce::measurement::{random_combiners, ReplayBatch};
use fdmimo_ce::rng::{derive_seed, rng_from_seed, StreamKind};
use fdmimo_ce::{bench, Error};

#[derive(Parser)]
#[command(
    name = "fdmimo-ce",
    version,
    about = "Compressive channel estimation benchmarks for hybrid planar-array MIMO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file; missing sections fall back to the preset.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file path.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed override (otherwise the config's `seed` key is required).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Built-in scale: desk (default) or paper.
    #[arg(long, value_name = "NAME", default_value = "desk")]
    preset: String,
    /// Suppress the resolved-config log.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured candidate-direction grid as text rows.
    GenDict(CommonArgs),
    /// Minimal-angle CDF comparison of the three grid methods (CSV).
    AnalyzeDict(CommonArgs),
    /// Simulate one measurement batch and write it as a binary container.
    Simulate(CommonArgs),
    /// Run the configured scheme on a stored batch and report its NMSE.
    Estimate(EstimateArgs),
    /// NMSE versus SNR for every configured scheme (CSV).
    SweepSnr(CommonArgs),
    /// NMSE versus pilot count for every configured scheme (CSV).
    SweepPilots(CommonArgs),
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Measurement batch written by `simulate`.
    #[arg(long, value_name = "PATH")]
    batch: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenDict(args) => gen_dict(args),
        Command::AnalyzeDict(args) => analyze_dict(args),
        Command::Simulate(args) => simulate(args),
        Command::Estimate(args) => estimate(args),
        Command::SweepSnr(args) => sweep(args, true),
        Command::SweepPilots(args) => sweep(args, false),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) => ExitCode::from(2),
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let preset: Preset = args.preset.parse()?;
    let file_text = match &args.config {
        Some(path) => Some(
            fs::read_to_string(path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path:?}: {e}"))))?,
        ),
        None => None,
    };
    let cfg = ExperimentConfig::resolve(preset, file_text.as_deref(), args.seed)?;
    if !args.quiet {
        // The resolved configuration makes every output self-describing.
        eprintln!("# resolved configuration");
        for line in cfg.to_toml_string().lines() {
            eprintln!("# {line}");
        }
    }
    Ok(cfg)
}

fn out_path<'a>(args: &'a CommonArgs, default: &'a str) -> &'a Path {
    args.out.as_deref().unwrap_or_else(|| Path::new(default))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path:?}: {e}"))))?;
    Ok(())
}

fn gen_dict(args: &CommonArgs) -> Result<(), Error> {
    let cfg = load_config(args)?;
    let dict = cfg.single_dictionary()?;
    let mut buf = Vec::new();
    write_grid_text(&dict.grid, &mut buf)?;
    let path = out_path(args, "grid.txt");
    write_file(path, &buf)?;
    println!(
        "wrote {} directions ({}) to {}",
        dict.len(),
        dict.grid.method(),
        path.display()
    );
    Ok(())
}

fn analyze_dict(args: &CommonArgs) -> Result<(), Error> {
    let cfg = load_config(args)?;
    let exp = dict_cdf_experiment(
        cfg.cdf.zenith_count,
        cfg.cdf.azimuth_count,
        cfg.cdf.angle_range,
        cfg.cdf.n_samples,
        cfg.cdf.table_rows,
        cfg.seed,
    )?;
    let mut buf = Vec::new();
    write_cdf_csv(&exp, &mut buf)?;
    let path = out_path(args, "dict_cdf.csv");
    write_file(path, &buf)?;
    println!(
        "G = {}, r0 = {:.6} rad; KS distances: sfg = {:.5}, uspd = {:.5}, usvd = {:.5}",
        cfg.cdf.zenith_count * cfg.cdf.azimuth_count,
        exp.r0,
        exp.ks_sfg,
        exp.ks_uspd,
        exp.ks_usvd
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn simulate(args: &CommonArgs) -> Result<(), Error> {
    let cfg = load_config(args)?;
    let geom = cfg.geometry()?;
    let chan_cfg = cfg.channel_config()?;
    let k = cfg.measurement.subcarriers;
    let noise_var = cfg.noise_var_for_snr_db(cfg.sweep.snr_db[0]);

    let mut channel_rng = rng_from_seed(derive_seed(cfg.seed, 0, StreamKind::Channel));
    let paths = sample_paths(&chan_cfg, &geom, k, &mut channel_rng)?;
    let channel = ChannelRealization::synthesize(paths, &geom, &chan_cfg, k)?;
    let mut combiner_rng = rng_from_seed(derive_seed(cfg.seed, 0, StreamKind::Combiner));
    let combiners = random_combiners(
        cfg.measurement.pilots,
        cfg.measurement.rf_chains,
        geom.n_elements(),
        cfg.measurement.tx_power,
        &mut combiner_rng,
    )?;
    let mut noise_rng = rng_from_seed(derive_seed(cfg.seed, 0, StreamKind::Noise));
    let batch = ReplayBatch::simulate(&channel, combiners, noise_var, &mut noise_rng)?;

    let mut buf = Vec::new();
    batch.write_to(&mut buf)?;
    let path = out_path(args, "batch.bin");
    write_file(path, &buf)?;
    println!(
        "wrote batch (M={}, L={}, N_a={}, K={}, sigma^2={}) to {}",
        batch.combiners.m_count(),
        batch.combiners.l_count(),
        batch.combiners.n_elements(),
        k,
        batch.noise_var,
        path.display()
    );
    Ok(())
}

fn estimate(args: &EstimateArgs) -> Result<(), Error> {
    let cfg = load_config(&args.common)?;
    let bytes = fs::read(&args.batch).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{:?}: {e}", args.batch)))
    })?;
    let replay = ReplayBatch::read_from(&mut std::io::Cursor::new(bytes))?;
    let batch = replay.whiten()?;

    let dict = cfg.single_dictionary()?;
    let mean_obs_power = batch.observations.norm_squared() / batch.observations.len() as f64;
    let sigma_est = batch
        .noise_var
        .max(cfg.estimator.noise_floor * mean_obs_power);
    let m = replay.combiners.m_count();
    let stop = StopRule::new(
        cfg.estimator.stop_factor * sigma_est,
        cfg.max_support_for(m, dict.len()),
    );
    let kind = cfg.estimator_kind()?;
    let result = match kind {
        EstimatorKind::Omp => {
            omp_with_mode(&batch.observations, &batch.sensing, &dict, &stop, cfg.omp_mode()?)?
        }
        EstimatorKind::Swomp => swomp(&batch.observations, &batch.sensing, &dict, &stop)?,
        EstimatorKind::Bsomp => {
            let opts = BsompOptions {
                ensemble: cfg.estimator.ensemble,
                stop,
                gamma0: cfg.estimator.gamma0,
                score_on_residual: cfg.estimator.score_on_residual,
            };
            let mut rng = rng_from_seed(derive_seed(cfg.seed, 0, StreamKind::Estimator));
            bsomp(&batch.observations, &batch.sensing, &dict, sigma_est, &opts, &mut rng)?
        }
    };
    let nmse = bench::nmse(&result.channel, &replay.truth)?;
    let label = format!("{}+{}", dict.grid.method(), kind);
    println!("scheme {label}: nmse = {nmse}");
    if let Some(path) = &args.common.out {
        let mut buf = Vec::new();
        writeln!(buf, "scheme,nmse").map_err(Error::Io)?;
        writeln!(buf, "{label},{nmse}").map_err(Error::Io)?;
        write_file(path, &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep(args: &CommonArgs, snr: bool) -> Result<(), Error> {
    let cfg = load_config(args)?;
    let (result, default_name) = if snr {
        (sweep_snr(&cfg)?, "sweep_snr.csv")
    } else {
        (sweep_pilots(&cfg)?, "sweep_pilots.csv")
    };
    let mut buf = Vec::new();
    write_sweep_csv(&result, &mut buf)?;
    let path = out_path(args, default_name);
    write_file(path, &buf)?;
    println!("wrote {} rows to {}", result.rows.len(), path.display());
    Ok(())
}
