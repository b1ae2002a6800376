use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ws_scenario::{
    list_presets, parse_config, preset, run_scenario, sweep, AnalysisKind, ConfigError, Context, Outcome, ScenarioConfig,
    ScenarioError,
};

/// Driven Wannier-Stark lattice scenarios: basis, full and reduced propagation, analysis.
#[derive(Parser)]
#[command(name = "wslattice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and export the Wannier-Stark basis of a scenario.
    Basis(Source),
    /// Run a scenario.
    Run(RunArgs),
    /// List the shipped presets.
    Presets,
    /// Run a scenario once per value of one key.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Shipped preset name or alias (fig1..fig6, bloch).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; defaults to the scenario's `output` or out/<name>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Exit with status 4 when any acceptance check fails.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Dotted key to vary, e.g. modulation.a.
    #[arg(long)]
    key: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    #[arg(long)]
    check: bool,
}

fn load(src: &Source) -> Result<(String, ScenarioConfig), ConfigError> {
    let text = match (&src.config, &src.preset) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?,
        (None, Some(name)) => preset(name)?.source.to_string(),
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = src.seed {
        cfg.seed = seed;
    }
    Ok((text, cfg))
}

fn out_dir(src: &Source, cfg: &ScenarioConfig) -> PathBuf {
    src.out.clone().unwrap_or_else(|| PathBuf::from(cfg.output.clone().unwrap_or_else(|| format!("out/{}", cfg.name))))
}

fn print_checks(o: &Outcome) {
    for c in &o.checks {
        println!("{} {:<32} {:>14.6e}  target {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.target);
    }
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run_one(cfg: &ScenarioConfig, out: &Path, check: bool) -> ExitCode {
    let mut ctx = Context::new();
    match run_scenario(cfg, out, &mut ctx) {
        Ok(o) => {
            print_checks(&o);
            println!("wrote {}", out.display());
            if check && !o.passed() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for (name, desc) in list_presets() {
                println!("{name:<18} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Basis(src) => match load(&src) {
            Ok((_, mut cfg)) => {
                cfg.run.engines.clear();
                cfg.analysis.kind = AnalysisKind::Basis;
                run_one(&cfg, &out_dir(&src, &cfg), false)
            }
            Err(e) => fail(&e.into()),
        },
        Command::Run(args) => match load(&args.source) {
            Ok((_, cfg)) => run_one(&cfg, &out_dir(&args.source, &cfg), args.check),
            Err(e) => fail(&e.into()),
        },
        Command::Sweep(args) => {
            let (text, cfg) = match load(&args.source) {
                Ok(v) => v,
                Err(e) => return fail(&e.into()),
            };
            let text = match args.source.seed {
                Some(seed) => match ws_scenario::with_override(&text, "seed", &seed.to_string()) {
                    Ok((t, _)) => t,
                    Err(e) => return fail(&e.into()),
                },
                None => text,
            };
            let out = out_dir(&args.source, &cfg);
            let mut ctx = Context::new();
            match sweep(&text, &args.key, &args.values, &out, &mut ctx) {
                Ok(results) => {
                    let mut code = ExitCode::SUCCESS;
                    for (v, r) in results {
                        println!("{} = {v}", args.key);
                        match r {
                            Ok(o) => {
                                print_checks(&o);
                                if args.check && !o.passed() && code == ExitCode::SUCCESS {
                                    code = ExitCode::from(4);
                                }
                            }
                            Err(e) => {
                                eprintln!("error: {e}");
                                code = ExitCode::from(e.exit_code() as u8);
                            }
                        }
                    }
                    println!("wrote {}", out.display());
                    code
                }
                Err(e) => fail(&e),
            }
        }
    }
}
