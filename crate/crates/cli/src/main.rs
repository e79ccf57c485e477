fn main() {
    std::process::exit(lipvessel_cli::run(std::env::args_os()));
}
