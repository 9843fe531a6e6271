use std::io::Write;

fn main() {
    let r = hartogs_lab::cli::run(std::env::args_os());
    std::io::stdout().write_all(r.stdout.as_bytes()).expect("stdout");
    std::io::stderr().write_all(r.stderr.as_bytes()).expect("stderr");
    std::process::exit(r.code);
}
