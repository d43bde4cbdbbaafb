fn main() {
    std::process::exit(fringe_lab::cli::main_with_args(std::env::args_os()));
}
