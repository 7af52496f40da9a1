use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ifp_cli::execute(std::env::args_os()))
}
