fn main() {
    std::process::exit(levyscale::cli::main_with_args(std::env::args_os()));
}
