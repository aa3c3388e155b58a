use std::io;
use std::process::ExitCode;

use clap::Parser;
use schemamatch_cli::args::{Cli, Command};
use schemamatch_cli::{commands, exit_code};

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::MatchTables { input, settings, run, format } => {
            commands::match_tables(&input, &settings, &run, format, &mut out)?;
        }
        Command::Review { run } => {
            commands::review(&run, io::stdin().lock(), &mut out)?;
        }
        Command::MatchAttributes { run, provider, output } => {
            commands::match_attributes(&run, &provider, output.as_deref(), &mut out)?;
        }
        Command::E2e { input, settings, output_dir, run_id } => {
            commands::e2e(&input, &settings, &output_dir, &run_id, &mut out)?;
        }
        Command::Eval { suite, settings, output, timings } => {
            commands::eval(&suite, &settings, output.as_deref(), timings, &mut out)?;
        }
        Command::EmbedCache { schema, instances, settings, output } => {
            let n = commands::embed_cache(&schema, &instances, &settings, &output)?;
            eprintln!("{n} column representations written to {}", output.display());
        }
        Command::Serve { runs, addr, settings } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(commands::serve(&runs, addr, &settings))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
