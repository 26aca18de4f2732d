fn main() -> std::process::ExitCode {
    ntn_tilt::cli::main_with_args(std::env::args_os())
}
