use anticross_cli::{configure_threads, run, Cli, THREADS_ENV};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    if let Err(e) = configure_threads(threads.as_deref()).and_then(|()| run(&cli)) {
        eprintln!("anticross: {e}");
        std::process::exit(e.exit_code());
    }
}
