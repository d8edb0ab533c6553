fn main() {
    std::process::exit(fracdeath::cli::run(std::env::args_os()));
}
