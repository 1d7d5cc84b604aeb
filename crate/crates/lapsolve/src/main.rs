fn main() {
    std::process::exit(lapsolve::cli::run(std::env::args_os()));
}
