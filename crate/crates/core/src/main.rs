fn main() {
    std::process::exit(magnipersist::cli::main_with_args(std::env::args_os()));
}
