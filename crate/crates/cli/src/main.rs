fn main() {
    std::process::exit(pcsft_cli::run(std::env::args_os()));
}
