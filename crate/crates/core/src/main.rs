fn main() {
    std::process::exit(irregular_entire::cli::run(std::env::args_os()));
}
