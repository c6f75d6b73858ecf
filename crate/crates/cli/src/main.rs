fn main() {
    std::process::exit(diagscope_cli::run(std::env::args_os()));
}
