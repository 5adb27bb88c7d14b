fn main() {
    std::process::exit(lagrange_cli::run(std::env::args_os()));
}
