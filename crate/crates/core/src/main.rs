fn main() {
    std::process::exit(bevm::cli::run(std::env::args_os().collect()));
}
