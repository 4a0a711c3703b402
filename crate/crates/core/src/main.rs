fn main() {
    std::process::exit(ptpfix::cli::run(std::env::args_os()));
}
