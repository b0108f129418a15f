mod commands;
mod expr;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tietze_core::Rational;

use commands::{CliError, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

/// Constructive reals and diagonal refutation of extensions of an
/// unextendible 0/1 function.
#[derive(Debug, Parser)]
#[command(name = "tietze", version)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the approximant at precision k of a rational expression.
    Approx {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        k: u32,
    },
    /// Print approximants 0..=k of lhs OP rhs.
    Arith {
        #[arg(long)]
        lhs: Rational,
        #[arg(long)]
        rhs: Option<Rational>,
        /// add, neg or mul
        #[arg(long)]
        op: String,
        #[arg(long)]
        k: u32,
    },
    /// List certified members of A and B as `<index> <A|B> <budget>`.
    Enumerate {
        #[arg(long)]
        max_index: u64,
        #[arg(long)]
        max_budget: u64,
    },
    /// Refute a candidate extension and print the witness record.
    Refute {
        /// const0, const1, parity, threshold:N, table-lookup,
        /// table:I=B,...;default=B or crn-const:Q
        #[arg(long)]
        candidate: String,
    },
    /// Walk through the whole counterexample.
    Demo,
    /// Check sequential closure of a finite set, and optionally separate it from another.
    CheckSpace {
        /// Comma-separated members.
        #[arg(long)]
        set: String,
        /// Comma-separated sequence prefix.
        #[arg(long)]
        terms: String,
        #[arg(long, default_value_t = 0)]
        stabilization: usize,
        /// A second comma-separated set to separate from the first.
        #[arg(long)]
        disjoint_from: Option<String>,
    },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Approx { expr, k } => commands::approx(expr, *k),
        Command::Arith { lhs, rhs, op, k } => commands::arith(lhs, rhs.as_ref(), op, *k),
        Command::Enumerate {
            max_index,
            max_budget,
        } => commands::enumerate(*max_index, *max_budget),
        Command::Refute { candidate } => commands::refute(candidate),
        Command::Demo => commands::demo(),
        Command::CheckSpace {
            set,
            terms,
            stabilization,
            disjoint_from,
        } => commands::check_space(set, terms, *stabilization, disjoint_from.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::JsonLines => {
                    for rec in &out.records {
                        println!("{rec}");
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
