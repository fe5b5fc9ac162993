use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maslov_cli::problem::{three_lines_problem, Problem, ProblemFile};
use maslov_cli::report;
use maslov_cli::suite::{self, FieldChoice, VerifyConfig, WeilConfig};
use maslov_cli::{CliError, ExitStatus};
use maslov_core::witt::AdditiveCharacter;

#[derive(Parser)]
#[command(
    name = "maslov",
    version,
    about = "Maslov index of cyclic Lagrangian tuples as a quadratic space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Prime,
    Rational,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Compute T, its form and invariants for every problem in a JSONL file.
    Compute {
        /// Problem file, or `-` for standard input.
        problem: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the sheaf cup product on H^1 with the form on T.
    Cup {
        problem: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a problem file with reduced row echelon bases.
    Canonicalize {
        problem: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every identity check on a seeded suite of random tuples.
    Verify {
        #[arg(long, value_enum, default_value = "prime")]
        field: FieldArg,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,11")]
        p: Vec<u32>,
        /// Largest half-dimension.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Largest tuple length; the smallest is 3.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Rerun a single instance of the suite.
        #[arg(long)]
        instance: Option<usize>,
        /// JSONL file with one record per instance and a closing summary.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Compose the canonical intertwiners around random cycles and compare with γ(−τ).
    Weil {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// Largest half-dimension.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        twist: i64,
        #[arg(long)]
        instance: Option<usize>,
        /// Check a problem file instead of a random suite; `three-lines` names the fixture.
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status.code() as u8)
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::validation(format!("{path}: {e}")))
    }
}

fn load_problems(path: &str) -> Result<Vec<(usize, Problem)>, CliError> {
    let files = ProblemFile::parse_jsonl(&read_input(path)?)?;
    if files.is_empty() {
        return Err(CliError::validation(format!("{path}: no problems")));
    }
    files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            Ok((
                i,
                f.to_problem()
                    .map_err(|e| e.context(format!("problem {i}")))?,
            ))
        })
        .collect()
}

fn emit(lines: &[String], out: &Option<PathBuf>) -> Result<(), CliError> {
    let mut text = lines.join("\n");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("report serializes")
}

fn run(cmd: Command) -> Result<ExitStatus, CliError> {
    match cmd {
        Command::Compute { problem, out } => {
            let mut status = ExitStatus::Success;
            let mut lines = Vec::new();
            for (i, p) in load_problems(&problem)? {
                let c = report::compute(&p).map_err(|e| e.context(format!("problem {i}")))?;
                for e in &c.problems {
                    eprintln!("problem {i}: {e}");
                    status = status.worst(e.status);
                }
                lines.push(json(&c.report));
            }
            emit(&lines, &out)?;
            Ok(status)
        }
        Command::Cup { problem, out } => {
            let mut status = ExitStatus::Success;
            let mut lines = Vec::new();
            for (i, p) in load_problems(&problem)? {
                let c = report::cup(&p).map_err(|e| e.context(format!("problem {i}")))?;
                for e in &c.problems {
                    eprintln!("problem {i}: {e}");
                    status = status.worst(e.status);
                }
                lines.push(json(&c.report));
            }
            emit(&lines, &out)?;
            Ok(status)
        }
        Command::Canonicalize { problem, out } => {
            let files = ProblemFile::parse_jsonl(&read_input(&problem)?)?;
            let lines = files
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    Ok(f.canonical()
                        .map_err(|e| e.context(format!("problem {i}")))?
                        .to_json())
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            emit(&lines, &out)?;
            Ok(ExitStatus::Success)
        }
        Command::Verify {
            field,
            p,
            m,
            n,
            count,
            seed,
            tol,
            instance,
            out,
            corrupt,
        } => {
            let cfg = VerifyConfig {
                fields: match field {
                    FieldArg::Prime => FieldChoice::Prime,
                    FieldArg::Rational => FieldChoice::Rational,
                    FieldArg::All => FieldChoice::All,
                },
                primes: p,
                max_m: m,
                max_n: n,
                count,
                seed,
                tol,
                corrupt,
                instance,
                ..VerifyConfig::default()
            };
            verify(&cfg, &out)
        }
        Command::Weil {
            p,
            m,
            n,
            count,
            seed,
            tol,
            twist,
            instance,
            problem,
            out,
        } => {
            let cfg = WeilConfig {
                p,
                max_m: m,
                n,
                count,
                seed,
                tol,
                psi_twist: twist,
                instance,
            };
            match problem {
                Some(path) => weil_problems(&path, &cfg, &out),
                None => weil_suite(&cfg, &out),
            }
        }
    }
}

fn verify(cfg: &VerifyConfig, out: &Option<PathBuf>) -> Result<ExitStatus, CliError> {
    let (records, summary) = suite::run_verify(cfg)?;
    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "verify: {} instances, seed {}, m ≤ {}, n in {}..={}, tol {:e}",
        summary.instances, cfg.seed, cfg.max_m, cfg.min_n, cfg.max_n, cfg.tol
    )?;
    writeln!(
        stdout,
        "{:<40} {:>6} {:>6} {:>6}",
        "property", "pass", "fail", "skip"
    )?;
    for (name, t) in &summary.tallies {
        writeln!(
            stdout,
            "{name:<40} {:>6} {:>6} {:>6}",
            t.pass, t.fail, t.skip
        )?;
    }
    for (name, res) in &summary.cross_checks {
        match res {
            None => writeln!(stdout, "{name:<40} pass")?,
            Some(msg) => writeln!(stdout, "{name:<40} FAIL {msg}")?,
        }
    }
    for r in records.iter().filter(|r| r.failures().next().is_some()) {
        for c in r.failures() {
            writeln!(
                stdout,
                "FAIL instance {} ({}, m={}, n={}, seed {}): {}: {}",
                r.index,
                r.field.name(),
                r.stats.m,
                r.stats.n,
                r.seed,
                c.property,
                c.message.as_deref().unwrap_or("")
            )?;
        }
        writeln!(stdout, "  replay: {}", cfg.replay_command(r.index))?;
    }
    let status = summary.status(&records);
    writeln!(
        stdout,
        "result: {} ({} of {} instances failed)",
        if summary.passed() { "PASS" } else { "FAIL" },
        summary.failed_instances.len(),
        summary.instances
    )?;
    if let Some(path) = out {
        let mut lines: Vec<String> = records.iter().map(json).collect();
        lines.push(json(&summary));
        emit(&lines, &Some(path.clone()))?;
    }
    Ok(status)
}

fn weil_suite(cfg: &WeilConfig, out: &Option<PathBuf>) -> Result<ExitStatus, CliError> {
    let records = suite::run_weil(cfg)?;
    let mut stdout = io::stdout().lock();
    let worst = records
        .iter()
        .map(|r| r.worst_residual())
        .fold(0.0, f64::max);
    let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        writeln!(
            stdout,
            "FAIL instance {}: scalar {:+.12}{:+.12}i, γ(−τ) {:+.12}{:+.12}i, residual {:e}",
            r.index,
            r.scalar.re,
            r.scalar.im,
            r.gamma_minus_tau.re,
            r.gamma_minus_tau.im,
            r.worst_residual()
        )?;
        writeln!(stdout, "  replay: {}", cfg.replay_command(r.index))?;
    }
    writeln!(
        stdout,
        "weil: {} instances over F_{}, m ≤ {}, n = {}, seed {}: {} match γ(−τ), worst residual {:e}",
        records.len(),
        cfg.p,
        cfg.max_m,
        cfg.n,
        cfg.seed,
        records.len() - failed.len(),
        worst
    )?;
    if let Some(path) = out {
        let lines: Vec<String> = records.iter().map(json).collect();
        emit(&lines, &Some(path.clone()))?;
    }
    Ok(if failed.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::Tolerance
    })
}

fn weil_problems(
    path: &str,
    cfg: &WeilConfig,
    out: &Option<PathBuf>,
) -> Result<ExitStatus, CliError> {
    let files = if path == "three-lines" {
        vec![three_lines_problem(cfg.p)]
    } else {
        ProblemFile::parse_jsonl(&read_input(path)?)?
    };
    let mut status = ExitStatus::Success;
    let mut lines = Vec::new();
    for (i, f) in files.iter().enumerate() {
        let p = f
            .to_problem()
            .map_err(|e| e.context(format!("problem {i}")))?;
        let maslov_cli::problem::Tuple::Prime(t) = &p.tuple else {
            return Err(CliError::validation(format!(
                "problem {i}: the Weil check needs a prime field"
            )));
        };
        if t.n() < 3 {
            return Err(CliError::validation(format!(
                "problem {i}: the Weil check needs n ≥ 3"
            )));
        }
        let psi = AdditiveCharacter::with_twist(t.field(), p.psi_twist)?;
        let r = suite::weil_record(i, t, &psi, p.tolerance)
            .map_err(|e| e.context(format!("problem {i}")))?;
        println!(
            "problem {i}: scalar {:+.12}{:+.12}i, γ(−τ) {:+.12}{:+.12}i, residual {:e}: {}",
            r.scalar.re,
            r.scalar.im,
            r.gamma_minus_tau.re,
            r.gamma_minus_tau.im,
            r.worst_residual(),
            if r.pass { "match" } else { "MISMATCH" }
        );
        if !r.pass {
            status = ExitStatus::Tolerance;
        }
        lines.push(json(&r));
    }
    if let Some(path) = out {
        emit(&lines, &Some(path.clone()))?;
    }
    Ok(status)
}
