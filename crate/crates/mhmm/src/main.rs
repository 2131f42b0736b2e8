fn main() {
    std::process::exit(mhmm::cli::run(std::env::args_os()));
}
