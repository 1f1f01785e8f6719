fn main() {
    std::process::exit(fano_cli::run_cli(std::env::args_os()));
}
