use clap::Parser;

fn main() {
    // clap exits with status 2 on usage errors, matching our own convention.
    let cli = tdoa_atlas_cli::Cli::parse();
    if let Err(e) = tdoa_atlas_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
