use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fourn::config::{ExperimentConfig, Generator};
use fourn::experiment::generate;
use fourn::io::{load_csv, load_sites, write_csv, write_importance, write_potts_csv, write_predictions};
use fourn::model::{prepare, FittedModel};
use fourn::run_experiment;
use fourn_core::simulate::sim_potts;
use fourn_core::{seed, FeatureKind, LossSpec};

#[derive(Parser)]
#[command(name = "fourn", version, about = "Nearest-neighbor neural network spatial prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base random seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of nearest neighbors.
    #[arg(long)]
    neighbors: Option<usize>,
    /// Feature design: kriging, np or kriging-np.
    #[arg(long)]
    features: Option<FeatureKind>,
    /// Training loss: mse or quantile:<gamma>.
    #[arg(long)]
    loss: Option<LossSpec>,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset and write data.csv.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// gp, transformed-gp, maxstable or potts.
        #[arg(long)]
        generator: Option<Generator>,
        /// Number of locations.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Fit a model to a CSV dataset and write model.json.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Training data (x,y,value).
        #[arg(long)]
        data: PathBuf,
    },
    /// Predict at the sites of a CSV file and write predictions.csv.
    Predict {
        #[command(flatten)]
        common: Common,
        /// Model file written by `fit`.
        #[arg(long)]
        model: PathBuf,
        /// Prediction sites (x,y or x,y,value).
        #[arg(long)]
        data: PathBuf,
    },
    /// Write the grouped input importance of a fitted model.
    Importance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
    },
    /// Run a replicated benchmark and write metrics.csv.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        generator: Option<Generator>,
        #[arg(long)]
        n: Option<usize>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

/// Config file plus command-line overrides, validated.
fn experiment_config(
    common: &Common,
    generator: Option<Generator>,
    n: Option<usize>,
) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path).map_err(usage)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.neighbors {
        cfg.m = m;
    }
    if let Some(f) = common.features {
        cfg.features = vec![f];
    }
    if let Some(l) = common.loss {
        cfg.losses = vec![l];
    }
    if let Some(g) = generator {
        cfg.generator = g;
    }
    if let Some(n) = n {
        cfg.n = n;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let path = out.join("data.csv");
    let data_seed = seed::stream(cfg.seed, "data");
    match cfg.generator {
        Generator::Potts => write_potts_csv(&path, &sim_potts(cfg.n, cfg.potts, data_seed)?)?,
        Generator::File(_) => return Err(usage(anyhow::anyhow!("simulate needs a simulating generator"))),
        _ => write_csv(&path, &generate(cfg, data_seed)?)?,
    }
    log::info!("wrote {}", path.display());
    Ok(())
}

fn fit(cfg: &ExperimentConfig, data: &Path, out: &Path) -> Result<(), Failure> {
    let training = load_csv(data)?;
    let mut settings = cfg.model_settings();
    settings.train.seed = seed::stream(cfg.seed, "network");
    let prep = prepare(&training, &settings)?;
    log::info!(
        "fitted covariance {:?} (loglik {:.4}, converged {})",
        prep.params,
        prep.fit.loglik,
        prep.fit.converged
    );
    let model = prep.train(cfg.features[0], cfg.losses[0], &settings.architecture, &settings.train)?;
    let path = out.join("model.json");
    model.save(&path)?;
    log::info!("wrote {} (best epoch {})", path.display(), model.best_epoch);
    Ok(())
}

fn predict(model: &Path, data: &Path, out: &Path) -> Result<(), Failure> {
    let model = FittedModel::load(model)?;
    let (sites, truth) = load_sites(data)?;
    let pred = model.predict(&sites)?;
    let path = out.join("predictions.csv");
    write_predictions(&path, &sites, truth.as_deref(), &pred)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn importance(model: &Path, out: &Path) -> Result<(), Failure> {
    let model = FittedModel::load(model)?;
    let path = out.join("importance.csv");
    write_importance(&path, &model.grouped_importance()?)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn bench(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let report = run_experiment(cfg)?;
    report.write_metrics_csv(out.join("metrics.csv"))?;
    if cfg.importance {
        report.write_importance_csvs(out)?;
    }
    for row in &report.rows {
        println!("{:<18} {:<14} {:.6} ({:.6})", row.method, row.metric, row.mean(), row.stderr());
    }
    if !report.valid {
        return Err(Failure::Runtime(anyhow::anyhow!(
            "{} of {} replications failed",
            report.failures.len(),
            report.replications
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { common, generator, n } => {
            let cfg = experiment_config(&common, generator, n)?;
            simulate(&cfg, &common.out)
        }
        Command::Fit { common, data } => {
            if !data.is_file() {
                return Err(usage(anyhow::anyhow!("data file {} does not exist", data.display())));
            }
            let cfg = experiment_config(&common, None, None)?;
            fit(&cfg, &data, &common.out).map_err(|f| match f {
                Failure::Runtime(e) => Failure::Runtime(e.context("fit failed")),
                u => u,
            })
        }
        Command::Predict { common, model, data } => predict(&model, &data, &common.out),
        Command::Importance { common, model } => importance(&model, &common.out),
        Command::Bench { common, generator, n } => {
            let cfg = experiment_config(&common, generator, n)?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("creating {}", common.out.display()))?;
            bench(&cfg, &common.out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
