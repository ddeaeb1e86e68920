fn main() {
    std::process::exit(foliations::cli::run(std::env::args().skip(1).collect()));
}
