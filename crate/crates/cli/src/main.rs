use std::process::ExitCode;

use clap::Parser;
use quadlie_cli::run::EXIT_INVALID;
use quadlie_cli::{run, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID as u8) } else { ExitCode::SUCCESS };
        }
    };
    let opts = cli.command.opts().clone();
    let mut outcome = run(&cli.command, &argv[1..]);
    if let Some(dir) = &opts.out {
        if let Err(e) = outcome.write_to(dir) {
            eprintln!("cannot write to {}: {e}", dir.display());
            return ExitCode::from(EXIT_INVALID as u8);
        }
    }
    print!("{}", outcome.stdout(opts.format));
    if outcome.exit != 0 {
        if let Some(err) = outcome.report.verdicts.get("error") {
            eprintln!("error: {}", err.as_str().unwrap_or_default());
        }
    }
    ExitCode::from(outcome.exit as u8)
}
