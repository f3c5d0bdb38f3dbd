use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use lief_cli::runner::{betti_of, run, Report, RunOptions};
use lief_cli::script::{parse_script, FieldChoice};
use lief_cli::suites;
use lief_core::free_lie::{lyndon_words, witt_dimension};

#[derive(Parser)]
#[command(name = "lief", version, about = "Exact computations with nilpotent Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks in a `.lie` script.
    Run {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a bundled suite, or `all` of them.
    Suite {
        name: String,
        #[command(flatten)]
        flags: Flags,
        /// Print the suite's script instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Dimension of the degree-n part of the free Lie algebra of rank m.
    Witt { rank: usize, degree: usize },
    /// Betti numbers b_0..b_n of an algebra declared in a script.
    Betti {
        file: PathBuf,
        algebra: String,
        n: usize,
        #[arg(long, value_parser = parse_field)]
        field: Option<FieldChoice>,
        #[arg(long)]
        class: Option<usize>,
    },
    /// Print a script in canonical form.
    Fmt { file: PathBuf },
}

#[derive(clap::Args)]
struct Flags {
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// `Q` or `Fp:<p>`; overrides the script.
    #[arg(long, value_parser = parse_field)]
    field: Option<FieldChoice>,
    /// Truncation class; overrides the script but not per-check classes.
    #[arg(long)]
    class: Option<usize>,
    /// Record wall-clock time per check (the report is then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

impl Flags {
    fn options(&self) -> RunOptions {
        RunOptions { field: self.field, class: self.class, timings: self.timings }
    }
}

fn parse_field(s: &str) -> Result<FieldChoice, String> {
    FieldChoice::parse(s).ok_or_else(|| format!("expected `Q` or `Fp:<p>`, got `{s}`"))
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn finish(reports: &[Report], flags: &Flags) -> anyhow::Result<bool> {
    if let Some(path) = &flags.json {
        let text = if reports.len() == 1 {
            reports[0].to_json()
        } else {
            let mut s = serde_json::to_string_pretty(reports)?;
            s.push('\n');
            s
        };
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn main_inner(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { file, flags } => {
            let text = read(&file)?;
            let report = run(&text, &flags.options()).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            print!("{}", report.summary());
            finish(&[report], &flags)
        }
        Command::Suite { name, flags, print } => {
            let names: Vec<&str> = if name == "all" {
                suites::SUITES.to_vec()
            } else {
                vec![suites::canonical(&name).ok_or_else(|| {
                    anyhow!("unknown suite `{name}`; expected one of {}, lemma-4.2 or all", suites::SUITES.join(", "))
                })?]
            };
            let mut reports = Vec::new();
            for n in names {
                let text = suites::script(n).expect("canonical name");
                if print {
                    print!("{text}");
                    continue;
                }
                let report = run(&text, &flags.options()).map_err(|e| anyhow!("suite {n}: {e}"))?;
                println!("== {n}");
                print!("{}", report.summary());
                reports.push(report);
            }
            finish(&reports, &flags)
        }
        Command::Witt { rank, degree } => {
            let w = witt_dimension(rank, degree);
            let lyndon = lyndon_words(rank, degree)?.len();
            println!("{w}");
            Ok(w == lyndon)
        }
        Command::Betti { file, algebra, n, field, class } => {
            let text = read(&file)?;
            let opts = RunOptions { field, class, timings: false };
            let b = betti_of(&text, &algebra, n, &opts).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            println!("[{}]", b.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            Ok(true)
        }
        Command::Fmt { file } => {
            let text = read(&file)?;
            let script = parse_script(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            print!("{script}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
