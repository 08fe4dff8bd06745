fn main() {
    std::process::exit(cswiretap::cli::run(std::env::args_os()));
}
