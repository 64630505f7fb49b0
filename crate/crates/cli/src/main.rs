fn main() {
    std::process::exit(hypercensus_cli::run(std::env::args_os()));
}
