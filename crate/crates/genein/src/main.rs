use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (code, output) = genein::cli::run_command(&args);
    if !output.is_empty() {
        if code == 2 {
            eprintln!("{}", output.trim_end());
        } else {
            println!("{}", output.trim_end());
        }
    }
    ExitCode::from(code)
}
