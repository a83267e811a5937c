fn main() {
    std::process::exit(asvplan::cli::run(std::env::args_os()));
}
