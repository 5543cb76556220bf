use levy_mix::cli;
use std::io::Write;

fn main() {
    let mut stderr = std::io::stderr();
    let threads = std::env::var("LEVY_MIX_THREADS").ok();
    if let Err(f) = cli::configure_threads(threads.as_deref()) {
        let _ = writeln!(stderr, "levy-mix: {}", f.message);
        std::process::exit(f.code);
    }
    let mut stdout = std::io::stdout().lock();
    let code = cli::run(std::env::args_os(), &mut stdout, &mut stderr);
    let _ = stdout.flush();
    std::process::exit(code);
}
