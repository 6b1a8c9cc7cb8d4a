use clap::Parser;

fn main() {
    let code = qbb_cli::run(qbb_cli::Cli::parse());
    std::process::exit(code);
}
