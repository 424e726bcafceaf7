use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use foliage::pipeline::{averaged_scenario, generator_table, run_checks, Format, Selection, Stage};
use foliage::scenario::{bundled_names, bundled_source, Scenario};

/// Exact verification of averaged Poisson connections and coupling Dirac
/// structures described by JSON scenario files.
#[derive(Debug, Parser)]
#[command(name = "foliage", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the verification pipeline and print a report.
    Check {
        /// Scenario file, or the name of a bundled scenario.
        scenario: String,
        /// Restrict to these stages (repeatable); prerequisites are computed
        /// but not reported.
        #[arg(long = "stage", value_name = "STAGE")]
        stages: Vec<String>,
        /// Include failing expressions in the report.
        #[arg(long)]
        witness: bool,
        /// `json` or `text`.
        #[arg(long, default_value = "text")]
        format: String,
        /// Exit 0 iff at least one check fails.
        #[arg(long)]
        expect_fail: bool,
    },
    /// Emit the averaged connection, Q and averaged sigma as a new scenario.
    Average {
        scenario: String,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the generator table of the coupling Dirac structure.
    Dirac {
        scenario: String,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// List the bundled scenarios.
    List,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn load(arg: &str) -> Result<Scenario, String> {
    let path = Path::new(arg);
    let source = if path.exists() {
        fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?
    } else if let Some(src) = bundled_source(arg) {
        src.to_string()
    } else {
        return Err(format!("{arg}: no such file or bundled scenario"));
    };
    Scenario::from_json(&source).map_err(|e| format!("{arg}: {e}"))
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Check {
            scenario,
            stages,
            witness,
            format,
            expect_fail,
        } => {
            let format: Format = format.parse().map_err(|e| format!("{e}"))?;
            let stages = stages
                .iter()
                .map(|s| s.parse::<Stage>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let s = load(&scenario)?;
            let report = run_checks(&s, &Selection::only(stages)).map_err(|e| format!("{scenario}: {e}"))?;
            print!("{}", report.render(format, witness));
            Ok(if report.passed() != expect_fail { 0 } else { EXIT_FAIL })
        }
        Command::Average { scenario, output } => {
            let s = load(&scenario)?;
            let file = averaged_scenario(&s).map_err(|e| format!("{scenario}: {e}"))?;
            let mut json = file.to_json();
            json.push('\n');
            match output {
                Some(path) => fs::write(&path, json).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{json}"),
            }
            Ok(0)
        }
        Command::Dirac { scenario, format } => {
            let format: Format = format.parse().map_err(|e| format!("{e}"))?;
            let s = load(&scenario)?;
            let rows = generator_table(&s).map_err(|e| format!("{scenario}: {e}"))?;
            match format {
                Format::Json => {
                    let v = serde_json::json!({ "schema": 1, "scenario": s.name(), "generators": rows });
                    println!("{}", serde_json::to_string_pretty(&v).expect("table serializes"));
                }
                Format::Text => {
                    for r in rows {
                        println!("{:<14} X = {}", r.label, r.vector);
                        println!("{:<14} a = {}", "", r.form);
                    }
                }
            }
            Ok(0)
        }
        Command::List => {
            for name in bundled_names() {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
