fn main() {
    std::process::exit(cqnn::cli::main_with_args(std::env::args_os()));
}
