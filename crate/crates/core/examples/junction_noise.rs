// Pulse noise injected between the stages affects the two orderings
// differently.
//
//     cargo run --example junction_noise

use ltvdecomp::cli::Config;
use ltvdecomp::decompose::decompose;
use ltvdecomp::systems::uniform_grid;
use ltvdecomp::verify::{decomposition_report, Scenario};
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let config = Config::builtin("example4")?;
    let c = config.parse_system()?.system;
    let k = config.constants.ok_or("scenario has no constants")?;
    let cfg = config.simulation()?;
    let d = decompose(&c, &k, &uniform_grid(cfg.t0, cfg.t_end, 64), 1e-9)?;
    let (noise, orderings) = config.noise();
    let scenario = Scenario::new(k, config.input.clone(), cfg).with_noise(noise, &orderings);
    let report = decomposition_report(&c, &d.first, &d.second, &scenario)?;
    let n = report.noise.ok_or("noise inactive")?;
    println!("rms(yAB - yC) = {:.4}", n.rms_ab_vs_c);
    println!("rms(yBA - yC) = {:.4}", n.rms_ba_vs_c);
    println!(
        "preferred ordering: {}",
        if n.ab_less_affected { "AB" } else { "BA" }
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
