use clap::Parser;

use gaudin_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = gaudin_cli::run(&cli) {
        eprintln!("gaudin: {e}");
        std::process::exit(e.exit_code());
    }
}
