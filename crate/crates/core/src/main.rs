fn main() {
    std::process::exit(wtsched::cli::run(std::env::args_os()));
}
