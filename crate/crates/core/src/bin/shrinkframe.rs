fn main() {
    std::process::exit(shrinkframe::cli::run(std::env::args_os()));
}
