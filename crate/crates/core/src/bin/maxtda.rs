fn main() {
    std::process::exit(maxtda::cli::run(std::env::args().collect()));
}
