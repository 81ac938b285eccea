fn main() {
    std::process::exit(pg4::cli::run(std::env::args_os()));
}
