fn main() {
    std::process::exit(robin_corner::cli::run_cli(std::env::args_os()));
}
