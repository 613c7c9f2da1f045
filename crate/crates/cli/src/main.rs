fn main() {
    std::process::exit(semflow_cli::run(std::env::args_os()));
}
