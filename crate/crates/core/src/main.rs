use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = cone2d::cli::run(std::env::args().skip(1));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
