// Recover the decomposition constants of a system, and report when none
// exist.
//
//     cargo run --example fit_constants

use ltvdecomp::decompose::{fit_constants, FitOptions};
use ltvdecomp::systems::{uniform_grid, ThirdOrderSystem};
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let cases = [
        (
            "first",
            ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3", "(t^3+3*t^2+9)/27", 0.0)?,
            0.0,
        ),
        (
            "euler",
            ThirdOrderSystem::parse("t^3", "9*t^2", "53*t/3", "155/27", 1.0)?,
            1.0,
        ),
        (
            "broken",
            ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3 + t^2", "(t^3+3*t^2+9)/27", 0.0)?,
            0.0,
        ),
    ];
    for (label, c, start) in cases {
        match fit_constants(&c, &uniform_grid(start, 10.0, 64), FitOptions::default()) {
            Ok(fit) => {
                let k = fit.constants;
                println!(
                    "{label}: e = ({:.6}, {:.6}, {:.6}), rms {:.1e}",
                    k.e2, k.e1, k.e0, fit.rms
                );
            }
            Err(e) => println!("{label}: {e}"),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
