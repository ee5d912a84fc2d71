use std::io::Write;

fn main() {
    let out = bunkbed_cli::run_cli(std::env::args_os());
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout()
        .write_all(out.stdout.as_bytes())
        .and_then(|()| std::io::stdout().flush());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
