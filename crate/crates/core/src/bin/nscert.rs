fn main() {
    std::process::exit(nscert::cli::run(std::env::args_os()));
}
