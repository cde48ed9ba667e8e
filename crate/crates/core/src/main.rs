use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use piast::engine::{self, render_machine, render_text, Verdict};
use piast::exec::Exec;
use piast::oracle::{bounded_mass, estimate_termination, RulePolicy, SimConfig};
use piast::parse::{parse_program, Program};

#[derive(Parser)]
#[command(name = "piast", version, about = "Almost-sure innermost termination prover for probabilistic TRSs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// Largest polynomial coefficient tried.
    #[arg(long, default_value_t = 2, global = true)]
    max_coeff: u64,
    /// Transformations allowed along one proof branch.
    #[arg(long, default_value_t = 8, global = true)]
    transform_depth: usize,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 300, global = true)]
    timeout: u64,
    #[arg(long, global = true)]
    no_transforms: bool,
    /// Alternative transformations tried per problem.
    #[arg(long, default_value_t = 1, global = true)]
    transform_breadth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    proof_format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 1000, global = true)]
    trials: u64,
    #[arg(long, default_value_t = 10_000, global = true)]
    step_cap: u64,
    /// Also compute the exact leaf mass up to this depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Try to prove iAST.
    Prove { file: PathBuf },
    /// Estimate the termination probability from a start term.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        start: String,
    },
}

fn load(path: &PathBuf) -> Result<Program, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_program(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn exec_for(jobs: usize) -> Result<Exec, String> {
    if jobs <= 1 {
        return Ok(Exec::Sequential);
    }
    if !cfg!(feature = "parallel") {
        return Err("--jobs needs the parallel feature".to_string());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| e.to_string())?;
    Ok(Exec::Parallel)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let o = cli.opts;
    let exec = exec_for(o.jobs)?;
    match cli.command {
        Command::Prove { file } => {
            let program = load(&file)?;
            let cfg = engine::Config {
                max_coeff: o.max_coeff,
                transform_depth: o.transform_depth,
                timeout: Duration::from_secs(o.timeout),
                enable_transforms: !o.no_transforms,
                transform_breadth: o.transform_breadth,
                exec,
            };
            let proof = engine::prove(&program.ptrs, &cfg);
            match o.proof_format {
                Format::Text => print!("{}", render_text(&proof)),
                Format::Machine => println!("{}", render_machine(&proof)),
            }
            Ok(ExitCode::from(if proof.verdict == Verdict::Yes { 0 } else { 1 }))
        }
        Command::Simulate { file, start } => {
            let program = load(&file)?;
            let start = program.parse_term(&start).map_err(|e| format!("--start: {e}"))?;
            let cfg = SimConfig { trials: o.trials, step_cap: o.step_cap, seed: o.seed, exec, ..SimConfig::default() };
            let est = estimate_termination(&program.ptrs, &start, &cfg);
            let policy = match cfg.rule_policy {
                RulePolicy::DeclarationOrder => "leftmost-innermost, first matching rule",
                RulePolicy::UniformRandom => "leftmost-innermost, uniform rule choice",
            };
            let mut doc = serde_json::json!({ "estimate": est, "note": format!("policy-relative estimate ({policy})") });
            if let Some(d) = o.depth {
                let mass = bounded_mass(&program.ptrs, &start, d, false).map_err(|e| e.to_string())?;
                doc["depth"] = d.into();
                doc["leaf_mass"] = mass.to_string().into();
            }
            match o.proof_format {
                Format::Machine => println!("{}", serde_json::to_string_pretty(&doc).expect("plain JSON")),
                Format::Text => {
                    println!(
                        "terminated {}/{} runs: {:.4} (95% interval [{:.4}, {:.4}])",
                        est.terminated, est.trials, est.point, est.low, est.high
                    );
                    println!("policy-relative estimate ({policy})");
                    if let Some(m) = doc.get("leaf_mass") {
                        println!("leaf mass at depth {}: {}", o.depth.unwrap_or(0), m.as_str().unwrap_or(""));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
