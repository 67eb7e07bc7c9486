use clap::Parser;
use purify_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = purify_cli::run(&cli, &mut lock) {
        eprintln!("purify: {e}");
        std::process::exit(e.exit_code());
    }
}
