fn main() {
    std::process::exit(qcc::cli::run(std::env::args_os()));
}
