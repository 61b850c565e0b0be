fn main() {
    std::process::exit(ncplane::cli::main_with_args(std::env::args_os()));
}
