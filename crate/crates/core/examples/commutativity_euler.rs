// An Euler-type pair that commutes: both orderings compose to the same
// system, and the three responses agree.
//
//     cargo run --example commutativity_euler

use ltvdecomp::cascade::{compose_ab, compose_ba};
use ltvdecomp::decompose::commutativity_residuals;
use ltvdecomp::expr::Expr;
use ltvdecomp::sim::{FrequencyUnit, Signal, SimConfig};
use ltvdecomp::systems::{
    uniform_grid, DecompositionConstants, FirstOrderSystem, SecondOrderSystem,
};
use ltvdecomp::verify::{decomposition_report, Scenario};
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let a = FirstOrderSystem::new(Expr::parse("t")?, Expr::parse("1")?).with_initial(-4.0);
    let b = SecondOrderSystem::new(Expr::parse("t^2")?, Expr::parse("4*t")?, Expr::parse("1")?)
        .with_initial(-4.0, 0.0);
    let t0 = 0.01;

    let ab = compose_ab(&a, &b, t0)?;
    let ba = compose_ba(&a, &b, t0)?;
    println!("AB: {:?}", ab.coefficients().map(|e| e.to_string()));
    println!("BA: {:?}", ba.coefficients().map(|e| e.to_string()));
    println!("AB initial data: {:?}", (ab.y0, ab.dy0, ab.ddy0));
    println!("BA initial data: {:?}", (ba.y0, ba.dy0, ba.ddy0));

    let r = commutativity_residuals(&a, &b, &uniform_grid(0.5, 2.0, 4), 1e-12)?;
    println!("{}", r.summary());

    let x = Signal::Sinusoid {
        amplitude: 100.0,
        bias: 0.0,
        frequency: 100.0,
        phase: std::f64::consts::FRAC_PI_3,
        unit: FrequencyUnit::Hz,
    };
    let k = DecompositionConstants::new(1.0, 1.0, -1.0);
    for step in [0.001, 0.0005, 0.00025] {
        let scenario = Scenario::new(k, x.clone(), SimConfig::new(t0, 0.15, step));
        let report = decomposition_report(&ab, &a, &b, &scenario)?;
        print!("step {step}:");
        for p in &report.distances {
            print!("  {} {:.2e}", p.pair, p.distance.rel_max_abs);
        }
        println!();
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
