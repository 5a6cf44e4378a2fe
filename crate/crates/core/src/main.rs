fn main() {
    std::process::exit(sbh::cli::run(std::env::args_os()));
}
