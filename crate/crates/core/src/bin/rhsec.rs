fn main() {
    std::process::exit(random_horizon::cli::main_with_args(std::env::args_os()));
}
