fn main() {
    std::process::exit(sculpt_cli::run(std::env::args_os()));
}
