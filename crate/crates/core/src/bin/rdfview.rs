use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rdfview::workspace::{
    cmd_apply, cmd_emit_trigger, cmd_materialize, cmd_verify, VerifyOptions, Workspace,
    WorkspaceError,
};

/// Materialize and maintain an RDB2RDF view as N-Quads.
#[derive(Parser)]
#[command(name = "rdfview", version)]
struct Cli {
    /// Workspace directory containing workspace.toml [default: .]
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the full view to <output>/view.nq.
    Materialize,
    /// Apply an update file, write its changeset folder and advance the data.
    Apply {
        update: PathBuf,
        /// Drop quads that appear in both removed.nq and added.nq.
        #[arg(long)]
        minimize: bool,
    },
    /// Check changesets against full rematerialization.
    Verify {
        /// Check the bundled case study.
        #[arg(long)]
        fixtures: bool,
        /// Number of random cases.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum tuples per relation.
        #[arg(long, default_value_t = 8)]
        size: usize,
    },
    /// Print the changeset trigger for a relation.
    EmitTrigger {
        relation: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, WorkspaceError> {
    let dir = cli.workspace.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Materialize => {
            let ws = Workspace::load(&dir)?;
            let (path, view) = cmd_materialize(&ws)?;
            println!("wrote {} quads to {}", view.len(), path.display());
        }
        Command::Apply { update, minimize } => {
            let mut ws = Workspace::load(&dir)?;
            let applied = cmd_apply(&mut ws, &update, minimize.then_some(true))?;
            println!(
                "changeset {}: {} removed, {} added -> {}",
                applied.sequence,
                applied.changeset.delta_minus.len(),
                applied.changeset.delta_plus.len(),
                applied.folder.display()
            );
        }
        Command::Verify {
            fixtures,
            random,
            seed,
            size,
        } => {
            let ws = match &cli.workspace {
                Some(d) if random.is_some() => Some(Workspace::load(d)?),
                _ => None,
            };
            let opts = VerifyOptions {
                fixtures,
                random,
                seed,
                size,
            };
            let (passed, report) = cmd_verify(ws.as_ref(), &opts)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            if !passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::EmitTrigger { relation, out } => {
            let ws = Workspace::load(&dir)?;
            let sql = cmd_emit_trigger(&ws, &relation, out.as_deref())?;
            if out.is_none() {
                print!("{sql}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
