//! Conserved pairs of the six Nambu schemes and their numerical drift.

use nambu_shadow::observables::{conservation_drift, symbolic_conservation_residual};
use nambu_shadow::{ConservedRegistry, FlowParams, OscillatorParams, State};

fn main() -> nambu_shadow::Result<()> {
    let registry = ConservedRegistry::standard();
    let p = FlowParams::default();
    for e in registry.entries() {
        let (rh, rg) = symbolic_conservation_residual(&registry, &e.label, &OscillatorParams::unit())?;
        let (dh, dg) = conservation_drift(&registry, &e.label, &p, &State::default(), 10_000)?;
        println!(
            "{}  H_c = {:<26} G_c = {:<26} exact through h^2: {:<5}  drift {dh:.1e} {dg:.1e}",
            e.label,
            e.render_h(),
            e.render_g(),
            rh.is_zero() && rg.is_zero()
        );
    }
    Ok(())
}
