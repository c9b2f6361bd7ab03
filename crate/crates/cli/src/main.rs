use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::{Cli, Command};

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()?;
    }
    match &cli.command {
        Command::Fit(c) => commands::fit(c),
        Command::Screen(c) => commands::screen(c),
        Command::Simulate(c) => commands::simulate(c),
        Command::Benchmark(c) => commands::benchmark(c),
        Command::Protocol(c) => commands::protocol(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
