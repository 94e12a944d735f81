fn main() {
    env_logger::init();
    std::process::exit(dioph_cli::run(std::env::args_os()));
}
