use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let inv = lagois_cli::main_with_args(std::env::args_os());
    print!("{}", inv.stdout);
    eprint!("{}", inv.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(inv.code as u8)
}
