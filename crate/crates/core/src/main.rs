use std::io::Write;

fn main() {
    let env_tol = std::env::var("QREL_TOL").ok();
    let out = qrel::cli::run(std::env::args_os(), env_tol.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
