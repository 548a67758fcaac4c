use std::process::exit;

use clap::Parser;

use windreg::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error}");
        exit(error.exit_code());
    }
}
