use std::process::ExitCode;

fn main() -> ExitCode {
    modpm_cli::run()
}
