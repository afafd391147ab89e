use std::process::ExitCode;

use dh_pencil::cli::{run, TOL_ENV};

fn main() -> ExitCode {
    let env = std::env::var(TOL_ENV).ok();
    let code = run(std::env::args_os(), env.as_deref(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
