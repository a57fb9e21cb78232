fn main() {
    std::process::exit(nfgcd::cli::run_cli(std::env::args_os()));
}
