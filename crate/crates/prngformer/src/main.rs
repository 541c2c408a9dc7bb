fn main() {
    std::process::exit(prngformer::cli::run());
}
