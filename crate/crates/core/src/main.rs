fn main() {
    std::process::exit(intermod::cli::main());
}
