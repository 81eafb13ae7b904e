//! Command-line front end for the `lagois` toolkit.
//!
//! A `.lag` file holds lattices, maps, connections, MoU edge sets,
//! domains, systems, programs and stores; see [`syntax`] for the grammar.
//! [`main_with_args`] runs one invocation and returns its exit code and
//! output, which is what the `lagois` binary prints.
//!
//! Exit codes: 0 when every check passed, 1 when a check found
//! violations, 2 for usage, parse, resolution and configuration errors.
//!
//! With `--format json` each command prints one JSON object with at least
//! `command` and `status` (`"pass"` or `"fail"`). Condition reports list
//! `{id, status, statement, witnesses: [{elements, note}]}`.

pub mod commands;
pub mod dot;
pub mod syntax;
pub mod workspace;

use clap::{Parser, Subcommand, ValueEnum};
use lagois::Direction;

pub use commands::{CliError, Outcome};
pub use syntax::{parse_decls, ParseError};
pub use workspace::{LoadError, ResolutionError, Workspace};

#[derive(Parser, Debug)]
#[command(
    name = "lagois",
    version,
    about = "Check bidirectional information-flow connections"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExpectArg {
    Lagois,
    Galois,
    Insertion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FromArg {
    Alpha,
    Gamma,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate lattices, connections and system configurations.
    Validate { file: String },
    /// Evaluate every connection condition.
    CheckConnection {
        file: String,
        #[arg(long)]
        connection: String,
        #[arg(long, value_enum, default_value_t = ExpectArg::Lagois)]
        expect: ExpectArg,
    },
    /// Derive the unique Lagois partner of a map.
    Derive {
        file: String,
        #[arg(long, value_enum)]
        from: FromArg,
        #[arg(long)]
        map: String,
    },
    /// Search an MoU edge set for new flows.
    Audit {
        file: String,
        #[arg(long)]
        edges: String,
    },
    /// Infer the type of a program.
    Typecheck {
        file: String,
        #[arg(long)]
        system: String,
        #[arg(long)]
        program: String,
    },
    /// Run a program and print the final stores.
    Run {
        file: String,
        #[arg(long)]
        system: String,
        #[arg(long)]
        program: String,
        #[arg(long = "store")]
        stores: Vec<String>,
    },
    /// Two-run non-interference test.
    NiTest {
        file: String,
        #[arg(long)]
        system: String,
        #[arg(long)]
        program: String,
        /// Adversary level as `<l>,<m>`; every mutually determined pair if omitted.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run ill-typed programs and accept any level. Results carry no guarantee.
        #[arg(long)]
        unsafe_skip_typecheck: bool,
    },
    /// Print a Graphviz digraph of the lattices or of one connection.
    ExportDot {
        file: String,
        #[arg(long)]
        connection: Option<String>,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    use commands as c;
    match &cli.command {
        Command::Validate { file } => Ok(c::validate(&c::load(file)?)),
        Command::CheckConnection {
            file,
            connection,
            expect,
        } => {
            let expect = match expect {
                ExpectArg::Lagois => c::Expect::Lagois,
                ExpectArg::Galois => c::Expect::Galois,
                ExpectArg::Insertion => c::Expect::Insertion,
            };
            c::check_connection(&c::load(file)?, connection, expect)
        }
        Command::Derive { file, from, map } => {
            let dir = match from {
                FromArg::Alpha => Direction::FromAlpha,
                FromArg::Gamma => Direction::FromGamma,
            };
            c::derive(&c::load(file)?, map, dir)
        }
        Command::Audit { file, edges } => c::audit(&c::load(file)?, edges),
        Command::Typecheck {
            file,
            system,
            program,
        } => c::typecheck(&c::load(file)?, system, program),
        Command::Run {
            file,
            system,
            program,
            stores,
        } => c::run_program(&c::load(file)?, system, program, stores),
        Command::NiTest {
            file,
            system,
            program,
            level,
            trials,
            seed,
            unsafe_skip_typecheck,
        } => {
            let args = c::NiArgs {
                level: level.clone(),
                trials: *trials,
                seed: *seed,
                unsafe_skip_typecheck: *unsafe_skip_typecheck,
            };
            c::ni_test(&c::load(file)?, system, program, &args)
        }
        Command::ExportDot { file, connection } => {
            c::export_dot(&c::load(file)?, connection.as_deref())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Invocation {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Invocation {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => Invocation {
            code: out.code,
            stdout: match cli.format {
                Format::Text => out.text,
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&out.json).expect("json")
                ),
            },
            stderr: String::new(),
        },
        Err(e) => {
            let stdout = match cli.format {
                Format::Text => String::new(),
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({ "status": "error", "error": e.to_string() })
                ),
            };
            Invocation {
                code: 2,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}
