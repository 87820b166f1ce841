//! `kproj`: run one command on document files and print the result.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kproj_core::cli::{run_texts, Flags, Format, EXIT_USAGE};
use kproj_core::graded::Window;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Resolve,
    Dualize,
    Generator,
    CheckQiso,
    Homology,
    FlatCert,
    Decompose,
    SplitCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Resolve => "resolve",
            Command::Dualize => "dualize",
            Command::Generator => "generator",
            Command::CheckQiso => "check-qiso",
            Command::Homology => "homology",
            Command::FlatCert => "flat-cert",
            Command::Decompose => "decompose",
            Command::SplitCheck => "split-check",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

/// Exact homological algebra over Z, Z/n and F_p.
///
/// Exit status: 0 when the check holds, 1 when a property fails (the output
/// is a counterexample document), 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "kproj", version)]
struct Cli {
    command: Command,
    /// Input documents; `-` reads standard input.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Degree window `a..b` for window-relative checks.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Resolution depth, or number of levels for `decompose`.
    #[arg(long)]
    depth: Option<usize>,
    /// Projective-dimension bound for `split-check`, entry bound for sampling.
    #[arg(long)]
    bound: Option<usize>,
    /// Sampler seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "machine")]
    format: OutputFormat,
}

fn read(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code);
        }
    };
    let mut texts = Vec::with_capacity(cli.inputs.len());
    for path in &cli.inputs {
        match read(path) {
            Ok(t) => texts.push(t),
            Err(e) => {
                eprintln!("kproj: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Machine => Format::Machine,
    };
    let flags = Flags { window: cli.window, depth: cli.depth, bound: cli.bound, seed: cli.seed, format };
    let outcome = run_texts(cli.command.name(), &texts, &flags);
    if let Some(m) = &outcome.message {
        eprintln!("kproj: {m}");
    }
    let _ = std::io::stdout().write_all(outcome.render(format).as_bytes());
    ExitCode::from(outcome.status)
}
