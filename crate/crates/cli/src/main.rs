use std::io::Write;

use clap::Parser;
use hypertree_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let code = match run(&cli, &mut stdout) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("hypertree: {e}");
            e.exit_code()
        }
    };
    let _ = stdout.flush();
    std::process::exit(code);
}
