fn main() {
    std::process::exit(radar_cli::run(std::env::args_os()));
}
