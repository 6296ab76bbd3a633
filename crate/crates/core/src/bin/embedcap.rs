fn main() {
    std::process::exit(embedcap::cli::main_with(std::env::args_os()));
}
