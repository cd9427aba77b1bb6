fn main() {
    std::process::exit(ncps_cli::run(std::env::args_os()));
}
