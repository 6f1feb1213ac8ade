//! Integrates a scheme and compares x3 with the original, conserved and
//! shadow closed-form solutions.

use nambu_shadow::observables::{beat_metrics, predicted_beat_period, ReferenceSolutions};
use nambu_shadow::{run, FlowParams, SplitScheme, State};

fn main() -> nambu_shadow::Result<()> {
    let p = FlowParams::default();
    let s0 = State::default();
    let label = "32123";
    let traj = run(&SplitScheme::builtin(label)?, s0, &p, 80_000, 1)?;
    let refs = ReferenceSolutions::new(&s0, &p, label)?;

    let max_diff = |f: &dyn Fn(f64) -> f64| traj.samples.iter().map(|s| (f(s.t) - s.x3).abs()).fold(0.0, f64::max);
    println!("max |x3o - x3| = {:.4}", max_diff(&|t| refs.original(t).x3));
    println!("max |x3c - x3| = {:.4}", max_diff(&|t| refs.conserved(t).x3));
    println!("max |x3s - x3| = {:.2e}", max_diff(&|t| refs.shadow(t).x3));

    let beat = beat_metrics(&traj, |t| refs.original(t).x3)?;
    println!(
        "beat peaks at t = {:.0}, envelope {:.0}, predicted {:.0}",
        beat.argmax_t,
        beat.envelope_period,
        predicted_beat_period(&p)?
    );
    Ok(())
}
