//! Second-order modified field of the Verlet schemes and their shadow Hamiltonian.

use nambu_shadow::{lv_single, modified_field, verlet_shadow_correction, Hamiltonians, OscillatorParams, SplitScheme};

fn main() -> nambu_shadow::Result<()> {
    let hs = Hamiltonians::new(&OscillatorParams::from_ints((2, 1), (3, 1)));
    for label in ["TVT", "VTV"] {
        let scheme = SplitScheme::builtin(label)?;
        let mf = modified_field(&scheme, &hs.generators())?;
        println!("{scheme}: v2 = {}", mf.v2);
    }
    let corr = verlet_shadow_correction(&hs.t, &hs.v);
    println!("H_S = H + h^2*({corr})");
    let tvt = modified_field(&SplitScheme::builtin("TVT")?, &hs.generators())?;
    println!("generates v2 of TVT: {}", lv_single(&corr) == tvt.v2);
    Ok(())
}
