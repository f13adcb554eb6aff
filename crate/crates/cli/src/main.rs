mod config;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use config::{parse_config, RunConfig, KNOWN_COMMANDS};
use pipeline::{BarrierQuery, Engine, Params, PointType};
use xyergo::numfmt::fmt_f64;
use xyergo::{PotentialSpec, RawSpec};

/// Ergodic optimization on the grid shift: optimal means, subactions,
/// barriers, Aubry sets, and perturbation experiments.
#[derive(Parser)]
#[command(name = "xyergo", version, disable_help_subcommand = true)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Builtin potential kind when no config file is given
    #[arg(long, global = true, value_name = "KIND")]
    potential: Option<String>,
    /// Grid resolution override
    #[arg(long, global = true, value_name = "INT")]
    n_cells: Option<usize>,
    /// Experiment seed override
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Output directory override
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// With `run`: execute every known command instead of the configured list
    #[arg(long, global = true)]
    check_all: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PointTypeArg {
    Fixed,
    Letter,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the twist condition
    Twist,
    /// Optimal ergodic average and diagonal analysis
    Alpha,
    /// Calibrated subaction and reweighted graph
    Subaction,
    /// Pairwise transition costs
    Mane,
    /// Barrier matrices, optionally with a point-to-point query
    Barrier {
        /// Source abscissa in [0, 1]
        #[arg(long)]
        from: Option<f64>,
        /// Target abscissa in [0, 1]
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, value_enum, default_value_t = PointTypeArg::Fixed)]
        point_type: PointTypeArg,
    },
    /// Aubry letters, classes, and the measure support cross-check
    Aubry,
    /// Certify a periodic word as static or semistatic
    StaticCheck {
        /// Comma-separated letter indices, e.g. 2,6
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<usize>,
    },
    /// Coordinate descent on cyclic orbits
    Descent {
        /// Orbit length; defaults to the 2,3,4 sweep
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Escape-cost gap function
    Gap {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Perturbation experiment around one diagonal point
    Tpo {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Execute the configured command list
    Run,
    /// Print the resolved configuration as TOML
    EmitConfig,
}

fn builtin_potential(kind: &str) -> anyhow::Result<PotentialSpec> {
    let raw = RawSpec {
        kind: kind.to_string(),
        degree: None,
        coeffs: None,
        base: None,
        epsilon: None,
    };
    PotentialSpec::try_from(raw).map_err(|e| anyhow::anyhow!("--potential: {e}"))
}

fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            if cli.potential.is_some() {
                bail!("--potential conflicts with --config; put the potential in the file");
            }
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => {
            let kind = cli
                .potential
                .as_deref()
                .unwrap_or("squared-difference-plus-well");
            RunConfig::with_potential(builtin_potential(kind)?)
        }
    };
    if let Some(n) = cli.n_cells {
        cfg.n_cells = n;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn headline(engine: &Engine) {
    if let Some(spectral) = engine.peek_spectral() {
        println!("alpha_grid: {}", fmt_f64(spectral.alpha_grid));
    }
    if let Some(report) = engine.peek_aubry() {
        let letters: Vec<String> = report.aubry_letters.iter().map(|l| l.to_string()).collect();
        println!("aubry letters: {}", letters.join(","));
    }
    for q in engine.peek_barrier_queries() {
        let value = match (&q.letter_value, &q.sequence) {
            (Some(v), _) => fmt_f64(*v),
            (None, Some(seq)) => match seq.value {
                xyergo::SequenceValue::Finite(v) => fmt_f64(v),
                xyergo::SequenceValue::Divergent => format!(
                    "DIVERGENT (growth {})",
                    fmt_f64(seq.growth_rate)
                ),
            },
            (None, None) => "UNAVAILABLE".to_string(),
        };
        println!(
            "barrier {} -> {} ({:?}): {value}",
            fmt_f64(q.query.from),
            fmt_f64(q.query.to),
            q.query.point_type
        );
    }
    for cert in engine.peek_static() {
        let word: Vec<String> = cert.word.iter().map(|l| l.to_string()).collect();
        println!(
            "word [{}]: static {} semistatic {} worst violation {}",
            word.join(","),
            cert.is_static,
            cert.is_semistatic,
            fmt_f64(cert.worst_violation)
        );
    }
    if let Some(tpo) = engine.peek_tpo() {
        println!(
            "tpo: unique_min {} argmin {} radius {}",
            tpo.unique_min,
            fmt_f64(tpo.argmin),
            fmt_f64(tpo.robustness_radius)
        );
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let cfg = resolve_config(&cli)?;

    if matches!(cli.command, Command::EmitConfig) {
        print!("{}", cfg.to_toml());
        return Ok(ExitCode::SUCCESS);
    }

    let mut params = Params::default();
    let mut static_word: Option<Vec<usize>> = None;
    let commands: Vec<String> = match &cli.command {
        Command::Twist => vec!["twist".into()],
        Command::Alpha => vec!["alpha".into()],
        Command::Subaction => vec!["subaction".into()],
        Command::Mane => vec!["mane".into()],
        Command::Aubry => vec!["aubry".into()],
        Command::Barrier {
            from,
            to,
            point_type,
        } => {
            match (from, to) {
                (Some(from), Some(to)) => {
                    params.barrier_query = Some(BarrierQuery {
                        from: *from,
                        to: *to,
                        point_type: match point_type {
                            PointTypeArg::Fixed => PointType::Fixed,
                            PointTypeArg::Letter => PointType::Letter,
                        },
                    });
                }
                (None, None) => {}
                _ => bail!("--from and --to must be given together"),
            }
            vec!["barrier".into()]
        }
        Command::StaticCheck { word } => {
            static_word = Some(word.clone());
            Vec::new()
        }
        Command::Descent { n, starts } => {
            if let Some(n) = n {
                params.descent_ns = vec![*n];
            }
            if let Some(starts) = starts {
                params.descent_starts = *starts;
            }
            vec!["descent".into()]
        }
        Command::Gap { delta, n_max } => {
            if let Some(delta) = delta {
                params.gap_delta = *delta;
            }
            if let Some(n_max) = n_max {
                params.gap_n_max = *n_max;
            }
            vec!["gap".into()]
        }
        Command::Tpo {
            a,
            eps,
            trials,
            noise,
        } => {
            params.tpo_a = *a;
            params.tpo_eps = *eps;
            if let Some(trials) = trials {
                params.tpo_trials = *trials;
            }
            params.tpo_noise = *noise;
            vec!["tpo".into()]
        }
        Command::Run => {
            if cli.check_all {
                KNOWN_COMMANDS.iter().map(|s| s.to_string()).collect()
            } else {
                cfg.commands.clone()
            }
        }
        Command::EmitConfig => unreachable!("handled above"),
    };

    let mut engine = Engine::new(cfg)?;
    let mut incomplete: Option<String> = None;
    if let Some(word) = &static_word {
        if let Err(err) = engine.execute_static(word) {
            incomplete = Some(err.to_string());
        }
    }
    if incomplete.is_none() {
        for command in &commands {
            if let Err(err) = engine.execute(command, &params) {
                incomplete = Some(format!("{command}: {err}"));
                break;
            }
        }
    }

    let path = report::write_all(&engine, incomplete.as_deref())
        .context("writing the report bundle")?;

    headline(&engine);
    for check in &engine.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("check {}: {verdict}", check.name);
    }
    println!("report: {}", path.display());

    if let Some(reason) = &incomplete {
        eprintln!("incomplete: {reason}");
        return Ok(ExitCode::from(2));
    }
    if !engine.all_passed() {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
