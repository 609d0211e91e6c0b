fn main() {
    std::process::exit(condorcet::cli::run(std::env::args_os()));
}
