//! Nested-commutator expansion of a Nambu scheme, its rewritings and the
//! shadow pairs they lead to.

use nambu_shadow::bch::{bch_shadow_pair, representations, Absorb};
use nambu_shadow::{commutator_expansion, modified_field, shadow_solve, Hamiltonians, OscillatorParams, SplitScheme};

fn main() -> nambu_shadow::Result<()> {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let scheme = SplitScheme::builtin(std::env::args().nth(1).as_deref().unwrap_or("12321"))?;
    let gens = hs.generators();
    let mf = modified_field(&scheme, &gens)?;
    println!("{scheme}: v2 = {}", mf.v2);
    for term in commutator_expansion(&scheme)? {
        if !term.field(&gens)?.is_zero() {
            println!("  {term}");
        }
    }

    let ac = (hs.a.clone(), hs.c.clone());
    let bd = (hs.b.clone(), hs.d.clone());
    println!("[X_AC, [X_AC, X_BD]] representations:");
    for r in representations(&ac, &ac, &bd) {
        println!("  {r}   from {} choices", r.choices.len());
    }

    let family = shadow_solve(&mf.v2, &hs.h, &hs.g, 2)?;
    println!("shadow family: particular dH = {}, dG = {}, dimension {}", family.particular.0, family.particular.1, family.dimension());
    for prefer in [Absorb::IntoDeltaH, Absorb::IntoDeltaG] {
        let pair = bch_shadow_pair(&scheme, &hs, prefer)?;
        println!("{prefer:?}: dH = {}, dG = {}", pair.delta_h, pair.delta_g);
    }
    Ok(())
}
