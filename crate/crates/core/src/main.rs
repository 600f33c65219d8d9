fn main() {
    std::process::exit(frontnodes::cli::run(std::env::args_os()));
}
