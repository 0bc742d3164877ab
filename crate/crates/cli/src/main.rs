use clap::error::ErrorKind;
use clap::Parser;
use restack_cli::args::{Cli, Command};
use restack_cli::commands::{cmd_ablate, cmd_dedup, cmd_run, cmd_synth};
use restack_cli::exit_code_for;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Dedup(args) => cmd_dedup(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}
