//! Compares the rewritten shadow pair with the exact shadow pair along the
//! alpha family.

use nambu_shadow::{bch_consistency_report, OscillatorParams, SplitScheme};

fn main() -> nambu_shadow::Result<()> {
    let scheme = SplitScheme::builtin("12321")?;
    for alpha in [0.0, 0.5, 1.0] {
        let report = bch_consistency_report(&scheme, alpha, &OscillatorParams::unit())?;
        print!("{}", report.render_text());
        println!();
    }
    Ok(())
}
