fn main() {
    std::process::exit(pharmonic::cli::main_with_args(std::env::args_os()));
}
