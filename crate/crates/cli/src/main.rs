fn main() {
    std::process::exit(deltaloop_cli::run(std::env::args_os()));
}
