use clap::Parser;

use gosszeta_cli::{load, run, RunConfig};

fn main() {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let cfg = match load(cfg) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    };
    let (out, code) = run(&cfg);
    if code == 0 || code == 1 {
        println!("{}", out.trim_end());
    } else {
        eprintln!("{}", out.trim_end());
    }
    std::process::exit(code);
}
