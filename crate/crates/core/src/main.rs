fn main() {
    std::process::exit(apsof::cli::run(std::env::args_os()));
}
