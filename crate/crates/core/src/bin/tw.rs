fn main() {
    std::process::exit(tw_core::cli::main_with_args(std::env::args_os()));
}
