fn main() {
    std::process::exit(modecast_cli::main_with_args(std::env::args_os()));
}
