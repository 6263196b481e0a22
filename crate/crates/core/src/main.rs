fn main() {
    std::process::exit(cgsws::cli::run(std::env::args_os()));
}
