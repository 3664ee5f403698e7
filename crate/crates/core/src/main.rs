fn main() {
    std::process::exit(subhardy::cli::run());
}
