fn main() {
    std::process::exit(listcolor::cli::main_with(std::env::args_os()));
}
