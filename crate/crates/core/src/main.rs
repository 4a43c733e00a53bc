use std::process::ExitCode;

fn main() -> ExitCode {
    tripipe::cli::main_with_args(std::env::args_os())
}
