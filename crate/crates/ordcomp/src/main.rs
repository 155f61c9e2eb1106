fn main() {
    std::process::exit(ordcomp::cli::run());
}
