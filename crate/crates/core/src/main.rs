fn main() {
    std::process::exit(amd_core::cli::main_with_args(std::env::args_os()));
}
