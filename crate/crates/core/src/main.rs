use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(polybound::cli::run(std::env::args_os()))
}
