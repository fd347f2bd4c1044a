fn main() {
    std::process::exit(vqsafe_cli::run(std::env::args_os()));
}
