//! Command-line front end: `derive`, `run`, `verify` and `table`.
//!
//! Exit codes are 0 on success, 1 when a verification fails or output
//! cannot be written, and 2 for usage errors. Every input is validated
//! before any file is created.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bch::{
    bch_consistency_report, bch_shadow_pair, commutator_expansion, modified_field, shadow_solve,
    verlet_shadow_correction, Absorb, HamPair,
};
use crate::error::{Error, Result};
use crate::flows::{FlowParams, Integrator, State};
use crate::model::{Hamiltonians, OscillatorParams};
use crate::observables::{conserved_pair, hamiltonians, ConservedRegistry, ReferenceSolutions};
use crate::poly::{parse_rational, Poly, Rational};
use crate::scheme::{SplitScheme, NAMBU_SCHEMES};
use crate::verify::{drift_table, verify, Level};

#[derive(Debug, Parser)]
#[command(
    name = "nambu-shadow",
    version,
    about = "Splitting integrators and shadow Hamiltonians for the Nambu harmonic oscillator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the effective generator, shadow family and consistency report.
    Derive(DeriveArgs),
    /// Integrate and write a CSV time series.
    Run(RunArgs),
    /// Run the self-checks.
    Verify(VerifyArgs),
    /// Print the conserved quantities with their measured drift.
    Table(TableArgs),
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn triple_arg(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long, default_value = "32123")]
    pub scheme: String,
    /// Mass, as an integer, fraction or decimal.
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    pub m: Rational,
    /// Angular frequency, as an integer, fraction or decimal.
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    pub omega: Rational,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "32123")]
    pub scheme: String,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, default_value = "1,1,1", value_parser = triple_arg, allow_negative_numbers = true)]
    pub x0: [f64; 3],
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Share of `F` given to `H`; every alpha generates the same motion.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Steps of the drift measurement run.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
}

/// Validated parameters of a `run`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scheme: SplitScheme,
    pub params: FlowParams,
    pub x0: State,
    pub nsteps: usize,
    pub stride: usize,
    pub alpha: f64,
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self> {
        if !NAMBU_SCHEMES.contains(&a.scheme.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "run accepts the Nambu schemes {}, got `{}`",
                NAMBU_SCHEMES.join(", "),
                a.scheme
            )));
        }
        let params = FlowParams::new(a.m, a.omega, a.h)?;
        if !(params.omega_h().abs() < 2.0) {
            return Err(Error::DomainError(format!(
                "|omega h| = {} must be below 2 for the shadow comparison",
                params.omega_h().abs()
            )));
        }
        if a.stride < 1 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        if !a.alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha = {} is not finite", a.alpha)));
        }
        Ok(RunConfig {
            scheme: SplitScheme::builtin(&a.scheme)?,
            params,
            x0: State::new(a.x0[0], a.x0[1], a.x0[2]),
            nsteps: a.steps,
            stride: a.stride,
            alpha: a.alpha,
            out_path: a.out.clone(),
        })
    }
}

pub const CSV_HEADER: &str = "t,x1,x2,x3,H,G,Hc,Gc,x3o,x3c,x3s,do,dc,ds";

/// Writes the CSV series of a run. Differences are reference minus numeric.
pub fn write_csv(cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    let p = &cfg.params;
    let hs = hamiltonians(p)?;
    let pair = conserved_pair(&cfg.scheme.label, p)?;
    let refs = ReferenceSolutions::new(&cfg.x0, p, &cfg.scheme.label)?;
    let polys = [&hs.h, &hs.g, &pair.h_c, &pair.g_c].map(Poly::compile);
    let integrator = Integrator::new(&cfg.scheme, p);
    let io_err = |source: io::Error| Error::Io {
        path: cfg.out_path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };

    writeln!(w, "{CSV_HEADER}").map_err(io_err)?;
    let mut s = cfg.x0;
    for k in 0..=cfg.nsteps {
        if k > 0 {
            s = integrator.step(s);
            s.t = cfg.x0.t + k as f64 * p.h;
        }
        if k % cfg.stride != 0 {
            continue;
        }
        let pt = s.point(p.h);
        let [h, g, hc, gc] = polys.each_ref().map(|f| f.eval(&pt));
        let x3o = refs.original(s.t).x3;
        let x3c = refs.conserved(s.t).x3;
        let x3s = refs.shadow(s.t).x3;
        let row = [s.t, s.x1, s.x2, s.x3, h, g, hc, gc, x3o, x3c, x3s, x3o - s.x3, x3c - s.x3, x3s - s.x3];
        let line = row.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Runs the integration and writes the CSV to the configured destination.
pub fn cmd_run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.out_path {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            write_csv(cfg, &mut BufWriter::new(file))
        }
        None => write_csv(cfg, stdout),
    }
}

/// Closed-form shadow corrections of `12321` for `alpha = 1` and
/// `alpha = 0`, with `x3` eliminated.
pub fn closed_form_pairs_12321(p: &OscillatorParams) -> [HamPair; 2] {
    let x1sq = Poly::x1().try_pow(2).expect("small degree");
    let x2sq = Poly::x2().try_pow(2).expect("small degree");
    let m = &p.m;
    let w2 = p.omega_sq();
    let twelve = Rational::from_integer(12.into());
    let first = (
        &x2sq.scale(&(&w2 / (m * &twelve))) + &x1sq.scale(&(m * &w2 * &w2 / &twelve)),
        x2sq.scale(&(Rational::new(1.into(), 4.into()) / (m * m))),
    );
    let second = (
        Poly::zero(),
        &x2sq.scale(&(Rational::new(1.into(), 12.into()) / (m * m))) - &x1sq.scale(&(&w2 / Rational::from_integer(6.into()))),
    );
    [first, second]
}

fn pair_text(p: &HamPair) -> String {
    format!("dH = {}, dG = {}", p.0, p.1)
}

/// The `derive` report.
pub fn cmd_derive(label: &str, m: &Rational, omega: &Rational, alpha: f64) -> Result<String> {
    let scheme = SplitScheme::builtin(label)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} is not finite")));
    }
    let params = OscillatorParams::new(m.clone(), omega.clone())?;
    let hs = Hamiltonians::new(&params);
    let mf = modified_field(&scheme, &hs.generators())?;
    let mut s = String::new();
    let _ = writeln!(s, "scheme {scheme} = {}", scheme.composition());
    let _ = writeln!(s, "m = {m}, omega = {omega}");
    let _ = writeln!(s, "effective generator v0 + h v1 + h^2 v2 + O(h^3):");
    let _ = writeln!(s, "  v0 = {}", mf.v0);
    let _ = writeln!(s, "  v1 = {}", mf.v1);
    let _ = writeln!(s, "  v2 = {}", mf.v2);

    if !scheme.is_nambu() {
        let corr = verlet_shadow_correction(&hs.t, &hs.v);
        let _ = writeln!(s, "shadow Hamiltonian -(h^2/24)({{{{V,T}},T}} - 2{{{{T,V}},V}}):");
        let _ = writeln!(s, "  H_S = H + h^2*({corr}) + O(h^3)");
        let _ = writeln!(s, "  matches v2: {}", crate::fields::lv_single(&corr) == mf.v2);
        return Ok(s);
    }

    let _ = writeln!(s, "v2 as nested commutators:");
    for t in commutator_expansion(&scheme)? {
        let zero = t.field(&hs.generators())?.is_zero();
        let _ = writeln!(s, "  {t}{}", if zero { "   (vanishes)" } else { "" });
    }

    let family = shadow_solve(&mf.v2, &hs.h, &hs.g, 2)?;
    let _ = writeln!(s, "shadow family X_{{dH,G}} + X_{{H,dG}} = v2 (degree <= 2):");
    let _ = writeln!(s, "  particular: {}", pair_text(&family.particular));
    let _ = writeln!(s, "  homogeneous dimension: {}", family.dimension());
    for b in &family.homogeneous_basis {
        let _ = writeln!(s, "    {}", pair_text(b));
    }
    for prefer in [Absorb::IntoDeltaH, Absorb::IntoDeltaG] {
        let p = bch_shadow_pair(&scheme, &hs, prefer)?;
        let pair = (p.delta_h.clone(), p.delta_g.clone());
        let _ = writeln!(
            s,
            "  rewriting leaning {:?}: {} (in family: {})",
            prefer,
            pair_text(&pair),
            family.contains(&pair)
        );
    }
    if scheme.label == "12321" {
        for (name, pair) in ["alpha = 1", "alpha = 0"].iter().zip(closed_form_pairs_12321(&params)) {
            let _ = writeln!(s, "  closed form ({name}): {} (in family: {})", pair_text(&pair), family.contains(&pair));
        }
    }
    let report = bch_consistency_report(&scheme, alpha, &params)?;
    s.push_str(&report.render_text());
    s.push_str("---\n");
    s.push_str(&report.render_kv());
    Ok(s)
}

/// The `table` report: the registry and the measured drift at the defaults.
pub fn cmd_table(registry: &ConservedRegistry, nsteps: usize) -> Result<String> {
    let rows = drift_table(registry, &FlowParams::default(), &State::default(), nsteps)?;
    let mut s = String::new();
    let _ = writeln!(s, "{:<7} {:<26} {:<26} {:>11} {:>11}", "scheme", "H_c", "G_c", "max|dHc|", "max|dGc|");
    for (e, r) in registry.entries().iter().zip(&rows) {
        let _ = writeln!(
            s,
            "{:<7} {:<26} {:<26} {:>11.3e} {:>11.3e}",
            e.label,
            e.render_h(),
            e.render_g(),
            r.max_dhc,
            r.max_dgc
        );
    }
    let _ = writeln!(s, "drift over {nsteps} steps at m = 1, omega = 1, h = 0.1, x0 = (1, 1, 1)");
    Ok(s)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let result: Result<i32> = match cli.command {
        Command::Derive(a) => cmd_derive(&a.scheme, &a.m, &a.omega, a.alpha).map(|text| {
            let _ = write!(out, "{text}");
            0
        }),
        Command::Run(a) => RunConfig::from_args(&a).and_then(|cfg| cmd_run(&cfg, out)).map(|()| 0),
        Command::Verify(a) => {
            let report = verify(a.level, &ConservedRegistry::standard());
            let _ = writeln!(out, "{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Table(a) => cmd_table(&ConservedRegistry::standard(), a.steps).map(|text| {
            let _ = write!(out, "{text}");
            0
        }),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        exit_code(&e)
    })
}
