use std::io::Write;

use cartan_core::cli::{run_args, EXIT_INPUT};

fn main() {
    let (out, code) = run_args(std::env::args_os());
    if code == EXIT_INPUT {
        eprint!("{out}");
    } else {
        print!("{out}");
        std::io::stdout().flush().ok();
    }
    std::process::exit(code);
}
