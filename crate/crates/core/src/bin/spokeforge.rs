use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spokeforge::evaluator::OutputKind;
use spokeforge::pipeline::{
    cmd_evaluate, cmd_export, cmd_generate, cmd_optimize, cmd_pareto, cmd_train, Algorithm, BackendChoice,
    CampaignConfig,
};
use spokeforge::Result;

/// Generative design campaigns for airless-tire spoke profiles.
#[derive(Debug, Parser)]
#[command(name = "spokeforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Campaign configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Campaign directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// proxy, surrogate or dataset:<csv>
    #[arg(long, global = true)]
    backend: Option<BackendChoice>,
    /// pso or bo
    #[arg(long, global = true)]
    algo: Option<Algorithm>,
    /// e.g. `target:rft=12000,target:rfc=1000,min:sedt,min:vib_rms`
    #[arg(long, global = true)]
    objective: Option<String>,
    /// Number of designs to generate.
    #[arg(long, global = true)]
    count: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample feasible designs into the archive.
    Generate,
    /// Attach performance records from the chosen backend.
    Evaluate,
    /// Fit per-output surrogates and report held-out R².
    Train,
    /// Single-objective or targeted optimization.
    Optimize,
    /// Multi-objective search and Pareto front.
    Pareto,
    /// Render SVG figures from the campaign directory.
    Export,
}

fn config(cli: &Cli) -> Result<CampaignConfig> {
    let mut c = match &cli.config {
        Some(path) => CampaignConfig::load(path)?,
        None => CampaignConfig::default(),
    };
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    if let Some(out) = &cli.out {
        c.out = out.clone();
    }
    if let Some(b) = &cli.backend {
        c.backend = b.clone();
    }
    if let Some(a) = cli.algo {
        c.algo = a;
    }
    if let Some(o) = &cli.objective {
        c.objective = o.clone();
    }
    if let Some(n) = cli.count {
        c.design_count = n;
        c.split = None;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> Result<()> {
    let c = config(cli)?;
    match cli.command {
        Command::Generate => {
            let s = cmd_generate(&c)?;
            println!(
                "generated {} designs in {} ({} of {} draws rejected)",
                s.accepted,
                c.out.display(),
                s.rejected,
                s.draws
            );
        }
        Command::Evaluate => {
            let s = cmd_evaluate(&c)?;
            println!(
                "{}: {} evaluated, {} already present, {} failed",
                s.backend,
                s.evaluated,
                s.skipped,
                s.failures.len()
            );
            for (id, msg) in &s.failures {
                println!("  {id}: {msg}");
            }
        }
        Command::Train => {
            let r = cmd_train(&c)?;
            println!("trained on {} designs, tested on {}", r.split.train, r.split.test);
            print!("{}", r.table());
        }
        Command::Optimize => {
            let o = cmd_optimize(&c)?;
            print!("{}", o.summary());
            if let Some(p) = o.proxy_record {
                let pct = p.improvement_over(&o.base_record);
                let line: Vec<String> = OutputKind::ALL
                    .iter()
                    .map(|k| format!("{k} {:+.2}%", pct[k.index()]))
                    .collect();
                println!("proxy check: {}", line.join(", "));
            }
            println!("bundle: {}", o.run_dir.display());
        }
        Command::Pareto => {
            let p = cmd_pareto(&c)?;
            println!(
                "{} non-dominated designs for {} written to {}",
                p.rows.len(),
                p.objective,
                p.run_dir.display()
            );
        }
        Command::Export => {
            let files = cmd_export(&c)?;
            if files.is_empty() {
                println!("nothing to export");
            }
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
