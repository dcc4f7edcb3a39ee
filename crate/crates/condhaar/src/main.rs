fn main() {
    std::process::exit(condhaar::cli::run(std::env::args_os()));
}
