fn main() {
    std::process::exit(mms_cli::main_with_args(std::env::args_os()));
}
