use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = lpa_cli::run_command(&args);
    print!("{}", outcome.report);
    ExitCode::from(outcome.code as u8)
}
