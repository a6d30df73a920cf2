fn main() {
    std::process::exit(dtqw::cli::run(std::env::args_os()));
}
