//! Command-line front end for `qbb`.

pub mod cache;
pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use cache::Cache;
use commands::{GraphFormat, Outcome, TableFormat};
use config::ProjectConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qbb", version, about = "Exact computations in quantum Borcherds-Bozec algebras")]
pub struct Cli {
    /// Project file (TOML, or JSON).
    #[arg(long, global = true, default_value = "qbb.toml")]
    pub config: PathBuf,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Skip the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the datum and the ν assignment.
    Validate,
    /// Gram matrix of the free form on the words of one weight.
    Gram {
        #[arg(long)]
        weight: String,
    },
    /// Membership of the Serre elements in the radical.
    SerreCheck {
        #[arg(long)]
        max_m: u32,
        #[arg(long)]
        max_n: u32,
    },
    /// Primitive generators and their τ values.
    Primitives {
        #[arg(long)]
        index: String,
        #[arg(long)]
        max_l: u32,
    },
    /// Crystal graph of B(∞), or of B(λ) with --lambda.
    Crystal {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Global basis of U⁻, or of V(λ) with --lambda.
    Global {
        #[arg(long)]
        height: u32,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: TableFormat,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        height: u32,
        /// Highest weights for the V(λ) checks; repeatable.
        #[arg(long = "lambda")]
        lambdas: Vec<String>,
    },
}

impl Command {
    fn cache_id(&self) -> serde_json::Value {
        match self {
            Command::Validate => json!(["validate"]),
            Command::Gram { weight } => json!(["gram", weight]),
            Command::SerreCheck { max_m, max_n } => json!(["serre-check", max_m, max_n]),
            Command::Primitives { index, max_l } => json!(["primitives", index, max_l]),
            Command::Crystal { depth, lambda, format } => json!(["crystal", depth, lambda, format!("{format:?}")]),
            Command::Global { height, lambda, format } => json!(["global", height, lambda, format!("{format:?}")]),
            Command::Verify { suite, height, lambdas } => json!(["verify", suite, height, lambdas]),
        }
    }
}

/// Computes a command's output, consulting the cache first.
pub fn execute(cfg: &ProjectConfig, command: &Command, cache: &Cache) -> anyhow::Result<Outcome> {
    let nu: Vec<_> = cfg.nu_table()?.into_iter().map(|((i, l), v)| json!([cfg.datum.name(i), l, v.to_canonical_string()])).collect();
    let limits = [cfg.limits.max_height, cfg.limits.max_depth];
    let key = Cache::key(&json!({"datum": cfg.datum, "nu": nu, "limits": limits, "command": command.cache_id()}));
    if let Some(hit) = cache.get(&key).as_ref().and_then(Outcome::from_json) {
        return Ok(hit);
    }
    let out = match command {
        Command::Validate => commands::validate(cfg),
        Command::Gram { weight } => commands::gram(cfg, weight),
        Command::SerreCheck { max_m, max_n } => commands::serre_check(cfg, *max_m, *max_n),
        Command::Primitives { index, max_l } => commands::primitives(cfg, index, *max_l),
        Command::Crystal { depth, lambda, format } => commands::crystal(cfg, *depth, lambda, *format),
        Command::Global { height, lambda, format } => commands::global(cfg, *height, lambda, *format),
        Command::Verify { suite, height, lambdas } => commands::verify(cfg, suite, *height, lambdas),
    }?;
    cache.put(&key, &out.to_json());
    Ok(out)
}

/// Exit status for an error: 1 for failed computations, 2 for bad input.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    match e.chain().find_map(|c| c.downcast_ref::<qbb::Error>()) {
        Some(qbb::Error::NoSolution(_) | qbb::Error::NonUnique(_) | qbb::Error::Internal(_) | qbb::Error::NotRegularAtZero(_) | qbb::Error::DivisionByZero) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: Cli) -> i32 {
    match run_inner(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn run_inner(cli: &Cli) -> anyhow::Result<i32> {
    let cfg = ProjectConfig::load(&cli.config)?;
    let cache = if cli.no_cache { Cache::disabled() } else { Cache::new(cfg.cache_dir()) };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build()?;
    let out = pool.install(|| execute(&cfg, &cli.command, &cache))?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.output.as_bytes())?;
    stdout.flush()?;
    if out.passed {
        Ok(EXIT_PASS)
    } else {
        eprintln!("check failed; see the report for the counterexample");
        Ok(EXIT_FAIL)
    }
}
