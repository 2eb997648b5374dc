fn main() {
    std::process::exit(combsim::cli::main());
}
