fn main() {
    std::process::exit(bsp_cli::run(std::env::args_os()));
}
