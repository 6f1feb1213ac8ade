//! Liouville fields of the split Hamiltonians and their commutators.

use nambu_shadow::scheme::Generator;
use nambu_shadow::{Hamiltonians, OscillatorParams};

fn main() {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let gens = hs.generators();
    for g in [Generator::X1, Generator::X2, Generator::X3] {
        println!("X{} = {}", g.symbol(), gens[&g]);
    }
    let sum = &(&gens[&Generator::X1] + &gens[&Generator::X2]) + &gens[&Generator::X3];
    println!("X1 + X2 + X3 == X_{{H,G}}: {}", sum == hs.nambu_field());

    let c12 = gens[&Generator::X1].commutator(&gens[&Generator::X2]);
    println!("[X1, X2] = {c12}");
    println!("div [X1, X2] = {}", c12.divergence());
    let c = gens[&Generator::X3].commutator(&gens[&Generator::X1].commutator(&gens[&Generator::X2]));
    println!("[X3, [X1, X2]] vanishes: {}", c.is_zero());
}
