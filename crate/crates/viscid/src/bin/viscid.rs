use clap::Parser;
use viscid::cli::{exit_code, run, Cli};

fn main() {
    if let Ok(threads) = std::env::var("VISCID_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        } else {
            eprintln!("warning: ignoring unparsable VISCID_THREADS = {threads}");
        }
    }
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
