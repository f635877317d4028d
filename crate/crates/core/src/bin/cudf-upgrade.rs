use clap::Parser;

use cudf_upgrade::cli::{run, CliConfig};

fn main() {
    std::process::exit(run(CliConfig::parse()));
}
