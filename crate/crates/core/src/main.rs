fn main() {
    std::process::exit(gridstat::cli::run());
}
