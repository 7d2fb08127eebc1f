// Parse, differentiate, simplify and evaluate coefficient expressions.
//
//     cargo run --example expression_calculus

use ltvdecomp::expr::Expr;
use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let b0 = Expr::parse("(t^2+3*t-6)/9")?;
    println!("b0(t)   = {b0}");
    println!("b0(3)   = {}", b0.eval(3.0)?);
    println!("b0'(t)  = {}", b0.derivative(1));
    println!("b0''(t) = {}", b0.derivative(2));

    // real signed roots for odd denominators
    let root = Expr::parse("t^(1/3)")?;
    println!("(-8)^(1/3) = {}", root.eval(-8.0)?);
    println!(
        "d/dt (8*t^3)^(1/3) = {}",
        Expr::parse("(8*t^3)^(1/3)")?.derivative(1)
    );

    let messy = Expr::parse("0*t + 1*t + (t - t) + 2/6")?;
    println!("{messy}  ->  {}", messy.simplify());

    match Expr::parse("1/t")?.eval(0.0) {
        Err(e) => println!("1/t at 0: {e}"),
        Ok(v) => return Err(format!("expected a domain error, got {v}").into()),
    }
    match Expr::parse("2*t +") {
        Err(e) => println!("parse error: {e}"),
        Ok(e) => return Err(format!("expected a parse error, got {e}").into()),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
