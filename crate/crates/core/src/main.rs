fn main() {
    std::process::exit(eocavity::cli::run(std::env::args_os()));
}
