use std::process::ExitCode;

fn main() -> ExitCode {
    perfeq::cli::run()
}
