fn main() {
    std::process::exit(intensity_cli::run(std::env::args_os()));
}
