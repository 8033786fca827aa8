use clap::Parser;
use temporal_hierarchy::{run_cli, Args};

fn main() {
    let args = Args::parse();
    if let Err(e) = run_cli(&args) {
        eprintln!("temporal-hierarchy: {e}");
        std::process::exit(e.exit_code());
    }
}
