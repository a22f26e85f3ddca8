use std::io::{stderr, stdout};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = rmdp_cli::run_cli(&args, &mut stdout(), &mut stderr());
    std::process::exit(code);
}
