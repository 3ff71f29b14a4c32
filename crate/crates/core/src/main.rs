fn main() {
    std::process::exit(betti_index::cli::run_cli(std::env::args_os()));
}
