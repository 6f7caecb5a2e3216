fn main() {
    std::process::exit(castplan::cli::main());
}
