use std::process::ExitCode;

fn main() -> ExitCode {
    wsrel_cli::run_from_env()
}
