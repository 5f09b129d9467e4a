fn main() {
    std::process::exit(spectralfield::cli::run(std::env::args_os()));
}
