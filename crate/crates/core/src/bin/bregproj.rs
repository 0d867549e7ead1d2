fn main() {
    std::process::exit(bregproj::cli::main_with_args(std::env::args_os()));
}
