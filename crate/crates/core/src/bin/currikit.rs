use clap::Parser;
use currikit::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = cli::run(cli) {
        eprintln!("currikit: {e}");
        std::process::exit(e.exit_code());
    }
}
