use clap::Parser;

fn main() {
    let cli = softgrip::cli::Cli::parse();
    std::process::exit(softgrip::cli::run(cli));
}
