fn main() {
    std::process::exit(ghostmpm::app::cli(std::env::args_os()));
}
