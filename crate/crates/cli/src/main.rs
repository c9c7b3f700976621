use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use bpom_cli::commands::{self, Format};
use bpom_cli::error::CliError;
use bpom_cli::server;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bpom", version, about = "Choreographies and branching pomsets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Loops {
    /// Unfold every loop this many times before encoding.
    #[arg(long, value_name = "K", conflicts_with = "reject_loops")]
    unfold: Option<usize>,
    /// Fail on loops (the default).
    #[arg(long)]
    reject_loops: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and pretty-print a choreography.
    Parse {
        /// Input file, `-` or nothing for stdin.
        path: Option<PathBuf>,
    },
    /// Report dependent guardedness of every loop.
    Check { path: Option<PathBuf> },
    /// Print the branching pomset of a choreography.
    Encode {
        path: Option<PathBuf>,
        #[command(flatten)]
        loops: Loops,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Step through a choreography and its pomset side by side.
    Sim {
        path: PathBuf,
        /// Read moves from this file instead of stdin; stops at the first bad move.
        #[arg(long)]
        script: Option<PathBuf>,
        #[command(flatten)]
        loops: Loops,
    },
    /// Check a choreography against its pomset, or two choreographies against each other.
    Bisim {
        path: PathBuf,
        other: Option<PathBuf>,
        #[command(flatten)]
        loops: Loops,
    },
    /// List completed traces.
    Traces {
        path: Option<PathBuf>,
        /// Explore the choreography up to this many steps instead of linearising the pomset.
        #[arg(long)]
        max_len: Option<usize>,
        /// Print only the number of traces.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        loops: Loops,
    },
    /// Serve the HTTP stepping API.
    Serve {
        #[arg(long, env = "BPOM_PORT", default_value_t = server::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Idle sessions are dropped after this many seconds.
        #[arg(long, env = "BPOM_SESSION_TTL_SECS", default_value_t = server::DEFAULT_TTL.as_secs())]
        ttl: u64,
    },
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| CliError::user(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Parse { path } => print(&commands::cmd_parse(&read_input(path.as_deref())?)?)?,
        Command::Check { path } => {
            let (report, ok) = commands::cmd_check(&read_input(path.as_deref())?)?;
            print(&report)?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Encode { path, loops, format } => {
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Dot => Format::Dot,
            };
            print(&commands::cmd_encode(&read_input(path.as_deref())?, loops.unfold, format)?)?;
        }
        Command::Sim { path, script, loops } => {
            let text = read_input(Some(&path))?;
            let mut out = io::stdout().lock();
            match script {
                Some(s) => {
                    let file = fs::File::open(&s).map_err(|e| CliError::user(format!("{}: {e}", s.display())))?;
                    commands::run_sim(&text, loops.unfold, BufReader::new(file), &mut out, true)?;
                }
                None => commands::run_sim(&text, loops.unfold, io::stdin().lock(), &mut out, false)?,
            }
        }
        Command::Bisim { path, other, loops } => {
            let text = read_input(Some(&path))?;
            let report = match other {
                Some(other) => commands::cmd_bisim_pair(&text, &read_input(Some(&other))?, loops.unfold)?,
                None => commands::cmd_bisim(&text, loops.unfold)?,
            };
            print(&report)?;
        }
        Command::Traces { path, max_len, count, loops } => {
            print(&commands::cmd_traces(&read_input(path.as_deref())?, max_len, loops.unfold, count)?)?;
        }
        Command::Serve { port, host, ttl } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                let addr = listener.local_addr()?;
                println!("listening on http://{addr}");
                server::serve(listener, Duration::from_secs(ttl)).await
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
