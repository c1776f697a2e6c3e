use clap::Parser;

fn main() {
    let cli = aerocell::cli::Cli::parse();
    if let Err(e) = aerocell::cli::dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
