//! `ersynth`: environment-restricted Petri net synthesis from the command line.
//!
//! Exit codes: 0 yes, 1 no, 2 unknown, 3 input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BruteArgs, SynthArgs};

#[derive(Parser, Debug)]
#[command(name = "ersynth", version, about = "Petri net synthesis with restricted place environments")]
struct Cli {
    /// Print the report as a JSON document.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a net whose places respect the given preset/postset bounds.
    Synth(SynthArgs),
    /// Check that a net's reachability graph is isomorphic to a transition system.
    Verify { ts: PathBuf, net: PathBuf },
    /// List the separation atoms of a transition system.
    Atoms {
        ts: PathBuf,
        /// Also print the linear systems built for each atom.
        #[arg(long)]
        dump_systems: bool,
    },
    /// Validate regions from a region file and list what they solve.
    CheckRegion {
        ts: PathBuf,
        regions: PathBuf,
        #[arg(long)]
        atom: Option<String>,
    },
    /// Search regions with small values exhaustively.
    Brute(BruteArgs),
    /// Build the gadget for a hitting-set instance.
    GenHs {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the pure gadget for a cubic one-in-three instance.
    #[command(name = "gen-1in3")]
    Gen1in3 {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the witness regions bundled with a gadget file.
    Witnesses { gadget: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Synth(args) => commands::synth(args),
        Command::Verify { ts, net } => commands::verify(ts, net),
        Command::Atoms { ts, dump_systems } => commands::atoms_cmd(ts, *dump_systems),
        Command::CheckRegion { ts, regions, atom } => commands::check_region(ts, regions, atom.as_deref()),
        Command::Brute(args) => commands::brute(args),
        Command::GenHs { instance, out } => commands::gen_hs(instance, out),
        Command::Gen1in3 { instance, out } => commands::gen_1in3(instance, out),
        Command::Witnesses { gadget } => commands::witnesses(gadget),
    };
    match result {
        Ok((report, verdict)) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(verdict.code())
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
