fn main() {
    std::process::exit(wigner_core::cli::run(std::env::args_os()));
}
