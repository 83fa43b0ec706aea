fn main() {
    std::process::exit(christol::cli::main_with_args(std::env::args_os()));
}
