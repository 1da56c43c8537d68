fn main() {
    std::process::exit(stable_entropy::cli::run(std::env::args_os()));
}
