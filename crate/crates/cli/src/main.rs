use clap::Parser;
use phykey_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("phykey: {e}");
        std::process::exit(e.exit_code());
    }
}
