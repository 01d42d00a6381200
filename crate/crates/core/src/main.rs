//! Command-line front end: train weights, evaluate policies over batches,
//! replay single episodes to CSV/SVG, and benchmark the stage solvers.

use clap::{Parser, Subcommand};
use reach_avoid::config;
use reach_avoid::error::Error;
use reach_avoid::harness::{
    self, bench_solver, episode_rng, load_weights, run_batch, run_episode, save_weights,
    ExperimentConfig, Method, WeightsMeta,
};
use reach_avoid::learning::train;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "reach-avoid", version, about = "Reach-avoid pursuit-evasion games via stage matrix games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train Q-function weights with min-max Q-learning.
    Train {
        /// Training config file (key = value lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the weights JSON.
        #[arg(long, value_name = "PATH")]
        out_weights: PathBuf,
        /// Optional per-episode training log CSV.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate a policy over a batch of random episodes.
    Eval {
        /// Evaluation config file (key = value lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Weights JSON (required for method m1).
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Evader decision method.
        #[arg(long)]
        method: Option<String>,
        /// Override the number of episodes.
        #[arg(long)]
        episodes: Option<u32>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Append a stats row to this CSV (creates it with a header).
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Play one episode from an explicit initial condition.
    Play {
        /// Initial-condition file: experiment keys plus ex/ey, tx/ty, pIx/pIy.
        #[arg(long)]
        init_file: PathBuf,
        /// Trace CSV output path.
        #[arg(long)]
        trace_csv: PathBuf,
        /// Trace SVG output path.
        #[arg(long)]
        trace_svg: PathBuf,
    },
    /// Benchmark stage-game build+solve time against the pursuer count.
    Bench {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Solves per pursuer count; the median is reported.
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        /// Timing table CSV output path (stdout if omitted).
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

/// Package version, extended with `git describe` when run inside a checkout.
fn version_string() -> String {
    let described = std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .and_then(|out| String::from_utf8(out.stdout).ok());
    match described {
        Some(d) if !d.trim().is_empty() => format!("{}+{}", env!("CARGO_PKG_VERSION"), d.trim()),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) => 2,
        Error::Solver { .. }
        | Error::TrainingDiverged { .. }
        | Error::DegenerateStage
        | Error::NonFiniteInput(_)
        | Error::NonUnitDirection(_)
        | Error::DegenerateInput(_) => 3,
        Error::Io(_) | Error::WeightsFile(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> reach_avoid::Result<()> {
    match cli.command {
        Command::Train { config, seed, out_weights, log } => {
            let mut cfg = match config {
                Some(path) => config::training_config_from_file(&path)?,
                None => reach_avoid::TrainingConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            eprintln!(
                "training: {} episodes, {} pursuers, v_e={}, v_p={}, seed={}",
                cfg.n_train, cfg.n_pursuers, cfg.v_e, cfg.v_p, cfg.seed
            );
            let (w, training_log) = train(&cfg)?;

            let meta = WeightsMeta {
                config: cfg,
                version: version_string(),
            };
            save_weights(&w, &meta, &out_weights)?;
            println!("weights: {:?} -> {}", w.0, out_weights.display());

            if let Some(log_path) = log {
                let mut f = std::io::BufWriter::new(std::fs::File::create(&log_path)?);
                writeln!(f, "episode,outcome,steps,max_weight_delta,alpha,beta")?;
                for e in &training_log.episodes {
                    writeln!(
                        f,
                        "{},{:?},{},{:.9e},{:.6},{:.6}",
                        e.episode, e.outcome, e.steps, e.max_weight_delta, e.alpha, e.beta
                    )?;
                }
                f.flush()?;
                println!("log: {} episodes -> {}", training_log.episodes.len(), log_path.display());
            }
            Ok(())
        }

        Command::Eval { config, weights, method, episodes, seed, out_csv } => {
            let mut cfg: ExperimentConfig = match config {
                Some(path) => config::experiment_config_from_file(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(m) = method {
                cfg.method = Method::parse(&m)
                    .ok_or_else(|| Error::Config(format!("--method expects m1|m2|m3, got `{m}`")))?;
            }
            if let Some(e) = episodes {
                cfg.episodes = e;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let weights_path = weights.or_else(|| cfg.weights_path.clone().map(PathBuf::from));
            let w = match (&cfg.method, weights_path) {
                (Method::M1, Some(path)) => Some(load_weights(&path)?.0),
                (Method::M1, None) => {
                    return Err(Error::Config("method m1 requires --weights".into()));
                }
                _ => None,
            };

            let stats = run_batch(&cfg, w.as_ref())?;
            println!(
                "method={} N={} v_e={} episodes={}",
                cfg.method.label(),
                cfg.n_pursuers,
                cfg.v_e,
                stats.episodes
            );
            println!(
                "captured {:>6.2}%  reached {:>6.2}%  timed-out {:>6.2}%  mean-steps-to-target {}",
                stats.captured_pct,
                stats.reached_pct,
                stats.timedout_pct,
                stats
                    .mean_steps_to_target
                    .map(|m| format!("{m:.1}"))
                    .unwrap_or_else(|| "-".into())
            );

            if let Some(path) = out_csv {
                let fresh = !path.exists();
                let mut f = std::fs::OpenOptions::new().create(true).append(true).open(&path)?;
                if fresh {
                    writeln!(f, "{}", harness::STATS_CSV_HEADER)?;
                }
                harness::write_stats_csv_row(&cfg, &stats, &mut f)?;
                println!("stats row -> {}", path.display());
            }
            Ok(())
        }

        Command::Play { init_file, trace_csv, trace_svg } => {
            let (cfg, init) = config::init_state_from_file(&init_file)?;
            let w = match (&cfg.method, &cfg.weights_path) {
                (Method::M1, Some(path)) => Some(load_weights(std::path::Path::new(path))?.0),
                (Method::M1, None) => {
                    return Err(Error::Config("method m1 requires weights_path in the init file".into()));
                }
                _ => None,
            };
            let mut rng = episode_rng(cfg.seed, 0);
            let record = run_episode(&cfg, init, w.as_ref(), &mut rng)?;
            harness::export_trace(&record, &trace_csv, &trace_svg)?;
            println!(
                "{:?} after {} steps; trace -> {}, {}",
                record.final_status,
                record.steps,
                trace_csv.display(),
                trace_svg.display()
            );
            Ok(())
        }

        Command::Bench { n_min, n_max, repeats, out_csv } => {
            if n_min < 1 || n_max < n_min {
                return Err(Error::Config(format!(
                    "need 1 <= n_min <= n_max, got {n_min}..{n_max}"
                )));
            }
            let ns: Vec<usize> = (n_min..=n_max).collect();
            let rows = bench_solver(&ns, repeats)?;
            let mut table = String::from("n,m1_median_s,m2_median_s\n");
            for r in &rows {
                table.push_str(&format!("{},{:.9e},{:.9e}\n", r.n_pursuers, r.m1_median_s, r.m2_median_s));
            }
            match out_csv {
                Some(path) => {
                    std::fs::write(&path, table)?;
                    println!("timing table -> {}", path.display());
                }
                None => print!("{table}"),
            }
            Ok(())
        }
    }
}
