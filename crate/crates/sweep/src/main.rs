use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qudit_sweep::run(std::env::args_os()))
}
