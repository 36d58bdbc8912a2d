use clap::Parser;

fn main() {
    let cli = tablewalk_cli::args::Cli::parse();
    std::process::exit(tablewalk_cli::run(&cli));
}
