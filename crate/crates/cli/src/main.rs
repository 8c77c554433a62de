fn main() {
    std::process::exit(mtensor_cli::run(std::env::args_os()));
}
