fn main() {
    std::process::exit(pdemscatter::cli::run_cli(std::env::args_os()));
}
