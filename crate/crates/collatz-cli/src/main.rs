//! `collatz`: trajectories, block decompositions, equal-length residue-class
//! sieves, stopping-time class enumerations and exact limit quotients.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 guard/cap
//! exhaustion. Data goes to stdout, diagnostics to stderr.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use collatz::core::{trajectory, Term};
use collatz::enumeration::{
    brute_length_classes, symbolic_length_classes, verify_fibonacci_conjectures,
};
use collatz::limits::{load_z_file, theorem5_quotient, theorem6_quotient};
use collatz::stopping::{
    enum_sigma_classes, enum_tau_classes, sigma, tau, tau_table, verify_conjecture_3,
    verify_conjecture_4,
};
use collatz::subseq::{decompose, extract_subsequence, is_stopping_sequence, Kind};
use collatz::{Error, ScanGuards};
use render::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    T,
    H,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::T => Kind::T,
            KindArg::H => Kind::H,
        }
    }
}

#[derive(Parser)]
#[command(name = "collatz", version, about = "Collatz subsequence and stopping-time toolkit")]
struct Cli {
    /// Output format for data on stdout.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,

    /// Worker threads for the enumeration scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Lift the default desk-scale modulus guards.
    #[arg(long, global = true)]
    unsafe_guard: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory of s up to and including the first 1.
    Traj {
        s: String,
        /// Step cap when 1 is never reached.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
    /// Split the trajectory of s into its subsequence blocks.
    Decompose {
        s: String,
        /// Maximum number of blocks before truncating.
        #[arg(long, default_value_t = 10_000)]
        max: usize,
    },
    /// The single subsequence block starting at s.
    Subseq { s: String },
    /// Residue classes of subsequences sharing one length.
    EnumLength {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        len: usize,
        /// Scan every residue below the modulus.
        #[arg(long, conflicts_with = "symbolic")]
        brute: bool,
        /// Breadth-wise class refinement (the default).
        #[arg(long)]
        symbolic: bool,
    },
    /// Conjecture checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Stopping time of s.
    Sigma { s: String },
    /// Stopping profile of s: sigma, tau, crossing value and block starts.
    Tau { s: String },
    /// Stopping residue classes mod 2^sigma for one n.
    EnumSigma {
        #[arg(long)]
        n: u64,
    },
    /// Tau-grouped residue classes mod 3*2^sigma for one n.
    EnumTau {
        #[arg(long)]
        n: u64,
        /// Keep only this tau group.
        #[arg(long)]
        tau: Option<u64>,
    },
    /// The A_tau(n) count table with sigma and z rows.
    Table {
        #[arg(long)]
        nmax: u64,
    },
    /// Exact limit quotients.
    #[command(subcommand)]
    Limits(LimitsCommand),
    /// Block-per-row glyph profile of the trajectory of s.
    Profile {
        s: String,
        /// Maximum number of blocks before truncating.
        #[arg(long, default_value_t = 10_000)]
        max: usize,
        /// Color stopping-sequences red.
        #[arg(long, conflicts_with = "plain")]
        ansi: bool,
        /// Mark stopping-sequences with `*` (the default).
        #[arg(long)]
        plain: bool,
    },
    /// First subsequences for every admissible start up to a bound.
    List {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        max: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Observed class counts against the Fibonacci closed forms.
    Fib(FibArgs),
    /// z(n) against half the tau-count sum.
    C3 {
        #[arg(long)]
        n: u64,
    },
    /// A_1(n) against the conjectured power of two.
    C4 {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args)]
struct FibArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    max: usize,
}

#[derive(Subcommand)]
enum LimitsCommand {
    /// 2^(G-1) / sum of 2^(G-n-beta_n).
    T5 {
        #[arg(long = "G")]
        g: u64,
    },
    /// 2^(G-1) / sum of 2^(G-floor(n log2 3)) z(n), z from a data file.
    T6 {
        #[arg(long = "G")]
        g: u64,
        #[arg(long)]
        z_file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let guards = if cli.unsafe_guard {
        ScanGuards::unrestricted()
    } else {
        ScanGuards::default()
    };
    match run(cli.command, cli.format.into(), &guards) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_exhausted() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command, format: Format, guards: &ScanGuards) -> Result<ExitCode, Error> {
    let ok = ExitCode::SUCCESS;
    match command {
        Command::Traj { s, cap } => {
            let s = Term::parse(&s)?;
            let t = trajectory(&s, |_, v| v.is_one(), cap)?;
            print!("{}", render::trajectory(&t, format));
            if !t.stopped {
                eprintln!("cap of {cap} steps exhausted before reaching 1");
                return Ok(ExitCode::from(2));
            }
            Ok(ok)
        }
        Command::Decompose { s, max } => {
            let s = Term::parse(&s)?;
            let d = decompose(&s, max)?;
            print!("{}", render::decomposition(&d, format));
            if d.completion == collatz::subseq::Completion::Truncated {
                eprintln!("truncated after {max} blocks");
                return Ok(ExitCode::from(2));
            }
            Ok(ok)
        }
        Command::Subseq { s } => {
            let s = Term::parse(&s)?;
            let sub = extract_subsequence(&s)?;
            print!("{}", render::subsequence(&sub, format));
            Ok(ok)
        }
        Command::EnumLength { kind, len, brute, .. } => {
            let kind = kind.into();
            let report = if brute {
                brute_length_classes(kind, len, guards)?
            } else {
                symbolic_length_classes(kind, len)?
            };
            print!("{}", render::length_report(&report, format));
            Ok(ok)
        }
        Command::Verify(VerifyCommand::Fib(args)) => {
            let kind = args.kind.into();
            let rows = verify_fibonacci_conjectures(kind, args.max, guards)?;
            print!("{}", render::fib_rows(kind, &rows, format));
            if rows.iter().all(|r| r.matches) {
                Ok(ok)
            } else {
                eprintln!("count mismatch against the closed form");
                Ok(ExitCode::from(1))
            }
        }
        Command::Verify(VerifyCommand::C3 { n }) => {
            let report = verify_conjecture_3(n, guards)?;
            print!("{}", render::conjecture3(&report, format));
            if report.matches {
                Ok(ok)
            } else {
                eprintln!("z(n) does not equal the half-sum");
                Ok(ExitCode::from(1))
            }
        }
        Command::Verify(VerifyCommand::C4 { n }) => {
            let report = verify_conjecture_4(n, guards)?;
            print!("{}", render::conjecture4(&report, format));
            if report.matches {
                Ok(ok)
            } else {
                eprintln!("A_1(n) is not the conjectured power of two");
                Ok(ExitCode::from(1))
            }
        }
        Command::Sigma { s } => {
            let s = Term::parse(&s)?;
            let k = sigma(&s, guards.iteration_cap)?;
            match format {
                Format::Text => println!("sigma={k}"),
                Format::Json => println!("{}", serde_json::json!({ "s": s.to_string(), "sigma": k })),
                Format::Csv => print!("s,sigma\n{s},{k}\n"),
            }
            Ok(ok)
        }
        Command::Tau { s } => {
            let s = Term::parse(&s)?;
            let profile = tau(&s, guards.iteration_cap)?;
            print!("{}", render::stopping_profile(&profile, format));
            Ok(ok)
        }
        Command::EnumSigma { n } => {
            let report = enum_sigma_classes(n, guards)?;
            print!("{}", render::sigma_report(&report, format));
            Ok(ok)
        }
        Command::EnumTau { n, tau } => {
            let report = enum_tau_classes(n, tau, guards)?;
            print!("{}", render::tau_report(&report, format));
            Ok(ok)
        }
        Command::Table { nmax } => {
            let table = tau_table(nmax, guards)?;
            print!("{}", render::count_table(&table, format));
            Ok(ok)
        }
        Command::Limits(LimitsCommand::T5 { g }) => {
            let report = theorem5_quotient(g)?;
            print!("{}", render::limit_report(&report, format));
            Ok(ok)
        }
        Command::Limits(LimitsCommand::T6 { g, z_file }) => {
            let z = load_z_file(&z_file)?;
            let report = theorem6_quotient(g, &z)?;
            print!("{}", render::limit_report(&report, format));
            Ok(ok)
        }
        Command::Profile { s, max, ansi, .. } => {
            let s = Term::parse(&s)?;
            let d = decompose(&s, max)?;
            let stopping: Vec<bool> = d
                .entries
                .iter()
                .map(|e| match e.subsequence.kind() {
                    Kind::T => is_stopping_sequence(&e.subsequence).expect("T-kind block"),
                    Kind::H => false,
                })
                .collect();
            match format {
                Format::Text => print!("{}", render::profile(&d, &stopping, ansi)),
                Format::Json => {
                    let rows: Vec<_> = d
                        .entries
                        .iter()
                        .zip(&stopping)
                        .map(|(e, &stop)| {
                            serde_json::json!({
                                "start": e.subsequence.start().to_string(),
                                "length": e.subsequence.terms().len(),
                                "stopping": stop,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows).expect("serializes"));
                }
                Format::Csv => print!("{}", render::profile_csv(&d, &stopping)),
            }
            if d.completion == collatz::subseq::Completion::Truncated {
                eprintln!("truncated after {max} blocks");
                return Ok(ExitCode::from(2));
            }
            Ok(ok)
        }
        Command::List { kind, max } => {
            let kind: Kind = kind.into();
            let mut out = String::new();
            for s in 1..=max {
                let admissible = match kind {
                    Kind::T => s % 12 == 3 || s % 12 == 7,
                    Kind::H => s % 12 == 9,
                };
                if !admissible {
                    continue;
                }
                let sub = extract_subsequence(&Term::from(s))?;
                out.push_str(&render::terms_line(sub.terms()));
                out.push('\n');
            }
            print!("{out}");
            Ok(ok)
        }
    }
}
