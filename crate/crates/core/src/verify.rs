//! Self-checks behind the `verify` subcommand.

use std::fmt;

use crate::bch::{bch_consistency_report, modified_field, verlet_shadow_correction};
use crate::error::Result;
use crate::fields::{lv_pair, lv_single};
use crate::flows::{rotation_angle, run, step, FlowParams, State};
use crate::model::{Hamiltonians, OscillatorParams};
use crate::observables::{
    conservation_drift, factor_f, symbolic_conservation_residual, ConservedRegistry, ReferenceSolutions,
};
use crate::poly::{rational, Poly};
use crate::scheme::{SplitScheme, NAMBU_SCHEMES, VERLET_SCHEMES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Check {
        r.unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Drift of `H_c` and `G_c` for one scheme at the default configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftRow {
    pub label: String,
    pub max_dhc: f64,
    pub max_dgc: f64,
}

pub const DRIFT_TOLERANCE: f64 = 1e-9;

/// Measures the drift of every registry entry over `nsteps` steps, one
/// worker per scheme, rows in registry order.
pub fn drift_table(registry: &ConservedRegistry, p: &FlowParams, s0: &State, nsteps: usize) -> Result<Vec<DriftRow>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = registry
            .entries()
            .iter()
            .map(|e| {
                let label = e.label.clone();
                scope.spawn(move || {
                    conservation_drift(registry, &label, p, s0, nsteps).map(|(dh, dg)| DriftRow {
                        label,
                        max_dhc: dh,
                        max_dgc: dg,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("drift worker panicked"))
            .collect()
    })
}

fn check_one_step() -> Check {
    let s = step(&SplitScheme::builtin("12321").expect("builtin"), State::default(), &FlowParams::default());
    let err = s.max_abs_diff(&State::new(1.09475, 0.895, 1.198975));
    Check::new("one-step-12321", err <= 1e-14, format!("max deviation {err:.2e}"))
}

fn check_verlet() -> Result<Check> {
    let hs = Hamiltonians::new(&OscillatorParams::unit());
    let mf = modified_field(&SplitScheme::builtin("TVT")?, &hs.generators())?;
    let corr = verlet_shadow_correction(&hs.t, &hs.v);
    let ok = mf.v2 == lv_single(&corr) && mf.v1.is_zero();
    Ok(Check::new("verlet-shadow", ok, format!("h^2 correction {corr}")))
}

fn check_nambu_shadow() -> Result<Check> {
    let mut ok = true;
    for params in OscillatorParams::samples() {
        let hs = Hamiltonians::new(&params);
        let mf = modified_field(&SplitScheme::builtin("12321")?, &hs.generators())?;
        let m = &params.m;
        let w2 = params.omega_sq();
        let x1sq = Poly::x1().try_pow(2)?;
        let x2sq = Poly::x2().try_pow(2)?;
        let dg = x2sq.scale(&(rational(1, 4) / (m * m)));
        let dh = &x2sq.scale(&(&w2 / (m * rational(12, 1)))) + &x1sq.scale(&(m * &w2 * &w2 / rational(12, 1)));
        ok &= mf.v2 == &lv_pair(&hs.h, &dg) + &lv_pair(&dh, &hs.g);
    }
    Ok(Check::new("nambu-shadow-12321", ok, "v2 matches X_{H,dG} + X_{dH,G} at three parameter samples"))
}

fn check_symbolic_conservation(registry: &ConservedRegistry, samples: &[OscillatorParams]) -> Check {
    let mut bad = Vec::new();
    for e in registry.entries() {
        for p in samples {
            match symbolic_conservation_residual(registry, &e.label, p) {
                Ok((rh, rg)) if rh.is_zero() && rg.is_zero() => {}
                Ok(_) => bad.push(e.label.clone()),
                Err(err) => bad.push(format!("{} ({err})", e.label)),
            }
        }
    }
    bad.dedup();
    let detail = if bad.is_empty() {
        format!("{} entries conserved through h^2", registry.entries().len())
    } else {
        format!("not conserved: {}", bad.join(", "))
    };
    Check::new("symbolic-conservation", bad.is_empty(), detail)
}

fn check_drift(registry: &ConservedRegistry, nsteps: usize) -> Result<(Check, Vec<DriftRow>)> {
    let rows = drift_table(registry, &FlowParams::default(), &State::default(), nsteps)?;
    let worst = rows
        .iter()
        .map(|r| r.max_dhc.max(r.max_dgc))
        .fold(0.0, f64::max);
    Ok((
        Check::new(
            "conserved-drift",
            worst <= DRIFT_TOLERANCE,
            format!("{nsteps} steps, worst drift {worst:.2e} (tolerance {DRIFT_TOLERANCE:.0e})"),
        ),
        rows,
    ))
}

fn check_reversibility() -> Result<Check> {
    let p = FlowParams::default();
    let s0 = State::new(0.7, -0.4, 1.3);
    let mut worst = 0.0f64;
    for l in NAMBU_SCHEMES.iter().chain(&VERLET_SCHEMES) {
        let scheme = SplitScheme::builtin(l)?;
        let back = step(&scheme, step(&scheme, s0, &p), &p.with_h(-p.h));
        worst = worst.max(back.max_abs_diff(&s0));
    }
    Ok(Check::new("reversibility", worst <= 1e-12, format!("worst round trip {worst:.2e}")))
}

fn check_angle() -> Result<Check> {
    let mut worst = 0.0f64;
    for x in [0.05, 0.1, 0.5, 1.0] {
        let p = FlowParams::new(1.0, 1.0, x)?;
        let a = (1.0 - x * x / 4.0).sqrt();
        worst = worst.max((a * factor_f(x)? * x - 2.0 * (x / 2.0).asin()).abs());
        worst = worst.max((rotation_angle(&p)? - (1.0 - x * x / 2.0).acos()).abs());
    }
    Ok(Check::new("angle-identity", worst <= 1e-12, format!("worst deviation {worst:.2e}")))
}

fn check_consistency() -> Result<Check> {
    let scheme = SplitScheme::builtin("12321")?;
    let mut ok = true;
    for alpha in [0.0, 0.5, 1.0] {
        let r = bch_consistency_report(&scheme, alpha, &OscillatorParams::unit())?;
        ok &= r.consistent && r.exact_in_family;
    }
    Ok(Check::new("bch-vs-exact-12321", ok, "alpha in {0, 0.5, 1}"))
}

fn check_shadow_tracking() -> Result<Check> {
    let p = FlowParams::default();
    let s0 = State::default();
    let traj = run(&SplitScheme::builtin("32123")?, s0, &p, 10_000, 1)?;
    let refs = ReferenceSolutions::new(&s0, &p, "32123")?;
    let (mut ds, mut dc) = (0.0f64, 0.0f64);
    for s in &traj.samples {
        ds = ds.max((refs.shadow(s.t).x3 - s.x3).abs());
        dc = dc.max((refs.conserved(s.t).x3 - s.x3).abs());
    }
    Ok(Check::new(
        "shadow-tracking-32123",
        ds <= 1e-8 && dc > 0.1,
        format!("max |x3s - x3| = {ds:.2e}, max |x3c - x3| = {dc:.3}"),
    ))
}

/// Outcome of a verification run.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub drift: Vec<DriftRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        if !self.drift.is_empty() {
            writeln!(f, "{:<8} {:>12} {:>12}", "scheme", "max|dHc|", "max|dGc|")?;
            for r in &self.drift {
                writeln!(f, "{:<8} {:>12.3e} {:>12.3e}", r.label, r.max_dhc, r.max_dgc)?;
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Runs the checks for `level` against `registry`.
pub fn verify(level: Level, registry: &ConservedRegistry) -> VerifyReport {
    let mut checks = vec![
        check_one_step(),
        Check::from_result("verlet-shadow", check_verlet()),
        Check::from_result("nambu-shadow-12321", check_nambu_shadow()),
        Check::from_result("reversibility", check_reversibility()),
        Check::from_result("angle-identity", check_angle()),
    ];
    let (samples, nsteps) = match level {
        Level::Quick => (vec![OscillatorParams::unit()], 10_000),
        Level::Full => (OscillatorParams::samples().to_vec(), 100_000),
    };
    checks.push(check_symbolic_conservation(registry, &samples));
    let drift = match check_drift(registry, nsteps) {
        Ok((c, rows)) => {
            checks.push(c);
            rows
        }
        Err(e) => {
            checks.push(Check::new("conserved-drift", false, format!("error: {e}")));
            Vec::new()
        }
    };
    if level == Level::Full {
        checks.push(Check::from_result("bch-vs-exact-12321", check_consistency()));
        checks.push(Check::from_result("shadow-tracking-32123", check_shadow_tracking()));
    }
    VerifyReport {
        checks,
        drift: if level == Level::Full { drift } else { Vec::new() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::ConservedEntry;

    #[test]
    fn quick_passes() {
        let r = verify(Level::Quick, &ConservedRegistry::standard());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn corrupted_entry_fails() {
        let mut entry = ConservedRegistry::standard().entry("31213").unwrap().clone();
        entry.g_terms[0].coeff = (1, 4);
        let bad = ConservedRegistry::standard().with_entry(entry);
        let r = verify(Level::Quick, &bad);
        assert!(!r.passed());
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["symbolic-conservation", "conserved-drift"]);
    }
}
