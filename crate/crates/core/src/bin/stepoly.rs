fn main() {
    std::process::exit(stepoly::cli::run(std::env::args_os()));
}
