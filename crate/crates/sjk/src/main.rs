fn main() {
    std::process::exit(sjk::cli::run(std::env::args_os()));
}
