fn main() {
    std::process::exit(glat::cli::main());
}
