fn main() {
    std::process::exit(husp_ull::cli::run(std::env::args_os()));
}
