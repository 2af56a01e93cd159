fn main() {
    std::process::exit(valuebias::cli::run(std::env::args_os()));
}
