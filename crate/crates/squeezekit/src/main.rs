fn main() {
    std::process::exit(squeezekit::cli::main_with_args(std::env::args_os()));
}
