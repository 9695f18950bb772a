fn main() {
    std::process::exit(orbifold::cli::main());
}
