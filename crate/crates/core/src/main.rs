fn main() {
    std::process::exit(linroot::cli::run(std::env::args_os()));
}
