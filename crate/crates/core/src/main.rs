use std::io;
use std::process::ExitCode;

use cstar_index::cli_reports::{exit_code, main_with_args, threads_from_env};

fn main() -> ExitCode {
    match threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: could not configure thread pool: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    }
    let stdout = io::stdout();
    let stderr = io::stderr();
    ExitCode::from(main_with_args(
        std::env::args_os(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    ))
}
