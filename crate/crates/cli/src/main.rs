fn main() {
    std::process::exit(fws_cli::run(std::env::args_os()));
}
