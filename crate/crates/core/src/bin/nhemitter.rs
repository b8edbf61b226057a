use clap::Parser;

use nhemitter::cli_io::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NHEMITTER_LOG", "warn")).init();
    // single-threaded dense algebra keeps outputs bit-reproducible
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
