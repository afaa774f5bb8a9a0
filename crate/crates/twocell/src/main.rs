use std::process::ExitCode;

fn main() -> ExitCode {
    twocell::cli::main_with_args(std::env::args_os())
}
