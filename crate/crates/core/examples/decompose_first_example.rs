// Factor a third-order system with polynomial coefficients into A and B and
// derive the initial values that keep C, AB and BA in agreement.
//
//     cargo run --example decompose_first_example

use ltvdecomp::decompose::{decompose, ic_conditions};
use ltvdecomp::systems::{uniform_grid, DecompositionConstants, ThirdOrderSystem};
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let c = ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3", "(t^3+3*t^2+9)/27", 1.0)?;
    let k = DecompositionConstants::new(1.0, 1.0, -1.0);

    let ic = ic_conditions(&c.clone().with_initial(1.0, 0.0, 0.0), &k)?;
    println!("kappa = {}", ic.kappa);
    println!(
        "with y(1) = 1: y'(1) = {}, y''(1) = {}",
        ic.required_dy0, ic.required_ddy0
    );

    let c = c.with_initial(1.0, ic.required_dy0, ic.required_ddy0);
    let d = decompose(&c, &k, &uniform_grid(0.0, 10.0, 100), 1e-9)?;
    println!("A: {} y' + ({}) y = x", d.first.a1, d.first.a0);
    println!(
        "B: {} y'' + ({}) y' + ({}) y = x",
        d.second.b2, d.second.b1, d.second.b0
    );
    println!("{}", d.report.summary());

    let mut spoiled = c.clone();
    spoiled.c1 = spoiled.c1.add(ltvdecomp::expr::Expr::int(1));
    if let Err(e) = decompose(&spoiled, &k, &uniform_grid(0.0, 10.0, 100), 1e-9) {
        println!("c1 + 1 is rejected:\n{e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
