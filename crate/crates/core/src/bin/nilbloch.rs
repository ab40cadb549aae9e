fn main() {
    std::process::exit(nilbloch::cli::main_with_args(std::env::args()));
}
