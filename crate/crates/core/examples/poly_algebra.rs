//! Exact rational polynomials: parsing, arithmetic, derivatives, substitution.

use nambu_shadow::poly::{rational, Var};
use nambu_shadow::Poly;

fn main() -> nambu_shadow::Result<()> {
    let a: Poly = "1/2*x2^2 + 3/4*x1*x3".parse()?;
    let b: Poly = "x3 - x1^2".parse()?;
    println!("a       = {a}");
    println!("b       = {b}");
    println!("a + b   = {}", &a + &b);
    println!("a * b   = {}", a.try_mul(&b)?);
    println!("da/dx1  = {}", a.diff(Var::X1));
    println!("a(x3 = x1^2) = {}", a.substitute(Var::X3, &"x1^2".parse()?)?);
    println!("2/3 a   = {}", a.scale(&rational(2, 3)));
    println!("a(0.5, -1, 2) = {}", a.eval(&[0.5, -1.0, 2.0, 0.0]));
    // a(0.5, -1, 2) = 1.25
    Ok(())
}
