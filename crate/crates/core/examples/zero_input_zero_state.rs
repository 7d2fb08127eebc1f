// Free response from consistent nonzero initial values, and forced response
// from rest, for a system with singular point at t = 0.
//
//     cargo run --example zero_input_zero_state

use ltvdecomp::decompose::{decompose, ic_conditions};
use ltvdecomp::sim::{FrequencyUnit, Signal, SimConfig};
use ltvdecomp::systems::{uniform_grid, DecompositionConstants, ThirdOrderSystem};
use ltvdecomp::verify::{decomposition_report, Scenario};
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let k = DecompositionConstants::new(1.0, 1.0, -1.0);
    let base = ThirdOrderSystem::parse("t^3", "9*t^2", "53*t/3", "155/27", 1.0)?;
    let cfg = SimConfig::new(1.0, 10.0, 0.01);
    let grid = uniform_grid(1.0, 10.0, 64);

    let ic = ic_conditions(&base.clone().with_initial(1.0, 0.0, 0.0), &k)?;
    println!(
        "kappa = {}; y'(1) = {}, y''(1) = {}",
        ic.kappa, ic.required_dy0, ic.required_ddy0
    );

    let free = base
        .clone()
        .with_initial(1.0, ic.required_dy0, ic.required_ddy0);
    let forced = base.with_initial(0.0, 0.0, 0.0);
    let sine = Signal::Sinusoid {
        amplitude: 10.0,
        bias: 0.0,
        frequency: 1.0,
        phase: 0.0,
        unit: FrequencyUnit::Hz,
    };
    for (label, c, x) in [
        ("zero input", free, Signal::Zero),
        ("zero state", forced, sine),
    ] {
        let d = decompose(&c, &k, &grid, 1e-9)?;
        let report = decomposition_report(&c, &d.first, &d.second, &Scenario::new(k, x, cfg))?;
        println!("-- {label}");
        for p in &report.distances {
            println!("{}: rel max = {:.3e}", p.pair, p.distance.rel_max_abs);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
