// Run a scenario the way the command line does and write its CSV files.
//
//     cargo run --example scenario_files -- example3 /tmp/example3

use ltvdecomp::cli::{main_with, Exit};
use std::error::Error;

pub fn run_with(scenario: &str, out: &str) -> Result<(), Box<dyn Error>> {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let args = [
        "ltvdecomp",
        "simulate",
        "--scenario",
        scenario,
        "--out",
        out,
        "--emit-plot-data",
    ];
    let exit = main_with(args, &mut stdout, &mut stderr);
    print!("{}", String::from_utf8_lossy(&stdout));
    if exit != Exit::Pass {
        return Err(format!("exit {}: {}", exit.code(), String::from_utf8_lossy(&stderr)).into());
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join("ltvdecomp-example3");
    run_with("example3", &dir.to_string_lossy())
}

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.as_slice() {
        [scenario, out] => run_with(scenario, out),
        _ => run(),
    }
}
