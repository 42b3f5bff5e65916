fn main() {
    std::process::exit(f2f_cli::run(std::env::args_os()));
}
