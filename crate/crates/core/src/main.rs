fn main() {
    std::process::exit(orbivol::cli::run(std::env::args_os()));
}
