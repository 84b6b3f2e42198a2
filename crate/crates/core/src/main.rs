fn main() {
    std::process::exit(quasiphoton::cli::run());
}
