fn main() {
    std::process::exit(qse::cli::run(std::env::args_os()));
}
