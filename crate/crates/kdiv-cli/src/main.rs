use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = kdiv_cli::run_command(&args);
    if outcome.code == kdiv_cli::EXIT_USAGE {
        eprint!("{}", outcome.output);
    } else {
        print!("{}", outcome.output);
    }
    ExitCode::from(outcome.code as u8)
}
