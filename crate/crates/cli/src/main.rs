use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(l2eis_cli::run(std::env::args_os()))
}
