fn main() {
    std::process::exit(harness::cli::main_with(std::env::args_os()));
}
