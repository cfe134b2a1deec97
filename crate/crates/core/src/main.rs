fn main() {
    std::process::exit(sharq::cli::run(std::env::args_os()));
}
