use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hermsig::{parse_session, run, RunOptions};
use hermsig_core::cones::SearchBounds;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser)]
#[command(name = "hermsig", version, about = "Signatures of hermitian forms over number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a session document and run its commands.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Coefficient height for the bounded certificate search.
        #[arg(long, default_value_t = SearchBounds::default().height)]
        search_height: i64,
        /// Maximum number of terms in a searched certificate.
        #[arg(long, default_value_t = SearchBounds::default().terms)]
        search_terms: usize,
    },
    /// Parse and validate a session document without running it.
    Check { file: PathBuf },
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_USAGE)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match parse_session(&text) {
                Ok(doc) => {
                    println!("ok: {} algebras, {} forms, {} elements, {} commands", doc.algebras.len(), doc.forms.len(), doc.elements.len(), doc.commands.len());
                    ExitCode::SUCCESS
                }
                Err(d) => {
                    eprintln!("{}:{d}", file.display());
                    ExitCode::from(EXIT_PARSE)
                }
            }
        }
        Command::Run { file, format, search_height, search_terms } => {
            if search_height < 1 || search_terms < 1 {
                eprintln!("error: --search-height and --search-terms must be at least 1");
                return ExitCode::from(EXIT_USAGE);
            }
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let doc = match parse_session(&text) {
                Ok(doc) => doc,
                Err(d) => {
                    eprintln!("{}:{d}", file.display());
                    return ExitCode::from(EXIT_PARSE);
                }
            };
            let opts = RunOptions { search: SearchBounds { height: search_height, terms: search_terms } };
            let report = run(&doc, opts);
            match format {
                Format::Json => print!("{}", report.to_json()),
                Format::Table => print!("{}", report.to_table()),
            }
            if report.has_errors() {
                ExitCode::from(EXIT_COMPUTE)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
