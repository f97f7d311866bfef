fn main() {
    std::process::exit(mptk_cli::run(std::env::args_os()));
}
