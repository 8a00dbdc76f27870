use std::process::ExitCode;

use interlace::Error;

fn main() -> ExitCode {
    match interlace::run_command(std::env::args_os()) {
        Ok(out) => {
            if out.written_to.is_none() {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(Error::Usage(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
