fn main() {
    std::process::exit(hofer_core::cli::run(std::env::args_os()));
}
