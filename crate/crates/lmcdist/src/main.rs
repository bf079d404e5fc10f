use std::io::{stderr, stdout};

fn main() {
    // Die quietly on a closed pipe (e.g. `lmcdist approx ... | head`), like
    // other line-oriented tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let args: Vec<String> = std::env::args().collect();
    let code = lmcdist::cli::run(&args, &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
