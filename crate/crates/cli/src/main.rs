use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(smoothbound_cli::run(std::env::args()) as u8)
}
