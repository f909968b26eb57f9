fn main() {
    std::process::exit(nls_blowup::cli::run(std::env::args_os()));
}
