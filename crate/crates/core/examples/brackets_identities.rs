//! Poisson and Nambu brackets with their Jacobi and fundamental identities.

use nambu_shadow::{fundamental_identity_residual, jacobi_residual, nambu, poisson, Hamiltonians, OscillatorParams};

fn main() {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    println!("H = {}, G = {}", hs.h, hs.g);
    println!("{{T, V}}       = {}", poisson(&hs.t, &hs.v));
    println!("{{x1, H, G}}   = {}", nambu(&"x1".parse().unwrap(), &hs.h, &hs.g));
    println!("{{x3, H, G}}   = {}", nambu(&"x3".parse().unwrap(), &hs.h, &hs.g));

    let j = jacobi_residual(&hs.t, &hs.v, &"x1*x2".parse().unwrap());
    println!("Jacobi residual on (T, V, x1 x2): {}", j.residual);
    let f = fundamental_identity_residual(&"x3".parse().unwrap(), &hs.a, &hs.c, &hs.b, &hs.d);
    println!("fundamental identity residual on (x3, A, C, B, D): {}", f.residual);
}
