fn main() {
    std::process::exit(sunflower::cli::main());
}
