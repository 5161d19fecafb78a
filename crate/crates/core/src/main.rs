use clap::Parser;

fn main() {
    let cli = wigson::cli::Cli::parse();
    if let Err(e) = wigson::cli::run(cli) {
        eprintln!("wigson: {e}");
        std::process::exit(e.exit_code());
    }
}
