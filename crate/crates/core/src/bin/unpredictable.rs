fn main() {
    std::process::exit(unpredictable::cli::run(std::env::args_os()));
}
