use std::io::{self, Write};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let stdin = io::stdin();
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let code = bpnet::cli::run(&args, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    std::process::exit(code);
}
