use clap::Parser;

fn main() {
    let args = orbitwalk::cli::Args::parse();
    std::process::exit(orbitwalk::cli::run(args));
}
