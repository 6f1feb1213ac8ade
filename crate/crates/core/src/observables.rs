//! Conserved quantities, the factor `F`, closed-form reference solutions
//! and drift diagnostics.

use crate::bch::modified_field;
use crate::error::{Error, Result};
use crate::fields::lv_pair;
use crate::flows::{FlowParams, State, Trajectory};
use crate::model::{Hamiltonians, OscillatorParams};
use crate::poly::{rational, rational_from_f64, to_f64, Monomial, Poly, Rational, Var};
use crate::scheme::{SplitScheme, NAMBU_SCHEMES};

/// Symbolic Hamiltonian pieces for float parameters (converted exactly).
pub fn hamiltonians(p: &FlowParams) -> Result<Hamiltonians> {
    Ok(Hamiltonians::new(&OscillatorParams::from_f64(p.m, p.omega)?))
}

/// `coeff * m^m_pow * omega^omega_pow * h^2 * var^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub coeff: (i64, i64),
    pub m_pow: i32,
    pub omega_pow: i32,
    pub var: Var,
}

impl Correction {
    pub const fn new(coeff: (i64, i64), m_pow: i32, omega_pow: i32, var: Var) -> Self {
        Correction {
            coeff,
            m_pow,
            omega_pow,
            var,
        }
    }

    pub fn to_poly(&self, p: &OscillatorParams) -> Poly {
        let pow = |x: &Rational, e: i32| -> Rational {
            let base = if e < 0 { x.recip() } else { x.clone() };
            num_traits::pow(base, e.unsigned_abs() as usize)
        };
        let c = rational(self.coeff.0, self.coeff.1) * pow(&p.m, self.m_pow) * pow(&p.omega, self.omega_pow);
        let mut exps = [0u8; 4];
        exps[self.var.index()] = 2;
        exps[Var::H.index()] = 2;
        Poly::term(c, Monomial::new(exps))
    }

    fn render(&self, slot: &str) -> String {
        let (n, d) = self.coeff;
        let sign = if n < 0 { "-" } else { "+" };
        let mut num = vec![];
        if n.abs() != 1 {
            num.push(n.abs().to_string());
        }
        let mut den = vec![];
        if d != 1 {
            den.push(d.to_string());
        }
        for (sym, e) in [("m", self.m_pow), ("w", self.omega_pow)] {
            let target = if e > 0 { &mut num } else { &mut den };
            match e.abs() {
                0 => {}
                1 => target.push(sym.to_string()),
                k => target.push(format!("{sym}^{k}")),
            }
        }
        let den = match den.len() {
            0 => String::new(),
            1 => format!("/{}", den[0]),
            _ => format!("/({})", den.join("*")),
        };
        let factor = match (num.is_empty(), den.is_empty()) {
            (true, true) => String::new(),
            (true, false) => format!("1{den}*"),
            _ => format!("{}{den}*", num.join("*")),
        };
        format!("{slot} {sign} {factor}h^2*{}^2", self.var.name())
    }
}

/// Conserved-quantity corrections of one scheme: `H_c = H + sum h_terms`,
/// `G_c = G + sum g_terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservedEntry {
    pub label: String,
    pub h_terms: Vec<Correction>,
    pub g_terms: Vec<Correction>,
}

impl ConservedEntry {
    pub fn render_h(&self) -> String {
        render_side("H", &self.h_terms)
    }

    pub fn render_g(&self) -> String {
        render_side("G", &self.g_terms)
    }
}

fn render_side(base: &str, terms: &[Correction]) -> String {
    terms.iter().fold(base.to_string(), |acc, c| c.render(&acc))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservedPair {
    pub h_c: Poly,
    pub g_c: Poly,
    pub scheme_label: String,
}

/// Closed-form conserved pairs of the six Nambu schemes, kept as data so
/// they can be checked against the symbolic and numeric pipelines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservedRegistry {
    entries: Vec<ConservedEntry>,
}

impl ConservedRegistry {
    pub fn standard() -> Self {
        use Var::{X1, X2};
        let entry = |label: &str, h: Vec<Correction>, g: Vec<Correction>| ConservedEntry {
            label: label.to_string(),
            h_terms: h,
            g_terms: g,
        };
        let g_x2 = Correction::new((1, 4), -2, 0, X2);
        let h_x1 = Correction::new((-1, 8), 1, 4, X1);
        ConservedRegistry {
            entries: vec![
                entry("12321", vec![], vec![g_x2.clone()]),
                entry("13231", vec![], vec![g_x2]),
                entry(
                    "31213",
                    vec![Correction::new((-1, 4), -1, 2, X2)],
                    vec![Correction::new((-1, 4), -2, 0, X2)],
                ),
                entry("21312", vec![h_x1.clone()], vec![]),
                entry("23132", vec![h_x1], vec![]),
                entry(
                    "32123",
                    vec![Correction::new((1, 8), 1, 4, X1)],
                    vec![Correction::new((1, 2), 0, 2, X1)],
                ),
            ],
        }
    }

    pub fn entries(&self) -> &[ConservedEntry] {
        &self.entries
    }

    pub fn entry(&self, label: &str) -> Result<&ConservedEntry> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| Error::UnknownScheme(label.to_string()))
    }

    /// Replaces (or adds) the entry with the same label.
    pub fn with_entry(mut self, entry: ConservedEntry) -> Self {
        match self.entries.iter_mut().find(|e| e.label == entry.label) {
            Some(slot) => *slot = entry,
            None => self.entries.push(entry),
        }
        self
    }

    pub fn conserved_pair(&self, label: &str, p: &OscillatorParams) -> Result<ConservedPair> {
        let e = self.entry(label)?;
        let hs = Hamiltonians::new(p);
        let sum = |base: &Poly, terms: &[Correction]| {
            terms.iter().fold(base.clone(), |acc, c| &acc + &c.to_poly(p))
        };
        Ok(ConservedPair {
            h_c: sum(&hs.h, &e.h_terms),
            g_c: sum(&hs.g, &e.g_terms),
            scheme_label: label.to_string(),
        })
    }
}

/// The standard conserved pair of a Nambu scheme at float parameters.
pub fn conserved_pair(label: &str, p: &FlowParams) -> Result<ConservedPair> {
    ConservedRegistry::standard().conserved_pair(label, &OscillatorParams::from_f64(p.m, p.omega)?)
}

/// `(v0 + h v1 + h^2 v2)` applied to `H_c` and `G_c`, truncated past `h^2`.
/// Both vanish exactly for a correct entry.
pub fn symbolic_conservation_residual(
    registry: &ConservedRegistry,
    label: &str,
    p: &OscillatorParams,
) -> Result<(Poly, Poly)> {
    let pair = registry.conserved_pair(label, p)?;
    let scheme = SplitScheme::builtin(label)?;
    let generator = modified_field(&scheme, &Hamiltonians::new(p).generators())?.generator()?;
    Ok((
        generator.try_apply(&pair.h_c)?.truncate_h(2),
        generator.try_apply(&pair.g_c)?.truncate_h(2),
    ))
}

/// Taylor coefficients of `F` in `x^2`: `(n!)^2 / (2n+1)!`.
fn factor_series_coefficient(n: u32) -> f64 {
    (1..=n).map(|k| (k * k) as f64 / (2 * k * (2 * k + 1)) as f64).product()
}

/// `sum_{n < terms} (n!)^2/(2n+1)! x^(2n) = 1 + x^2/6 + x^4/30 + x^6/140 + ...`.
pub fn factor_f_series(x: f64, terms: u32) -> f64 {
    let x2 = x * x;
    (0..terms).rev().fold(0.0, |acc, n| acc * x2 + factor_series_coefficient(n))
}

/// `F(x) = 2 asin(x/2) / (x sqrt(1 - x^2/4))` for `|x| < 2`.
pub fn factor_f(x: f64) -> Result<f64> {
    if !(x.abs() < 2.0) {
        return Err(Error::DomainError(format!("F(x) needs |x| < 2, got {x}")));
    }
    if x.abs() < 1e-4 {
        return Ok(factor_f_series(x, 3));
    }
    Ok(2.0 * (x / 2.0).asin() / (x * (1.0 - x * x / 4.0).sqrt()))
}

/// Frequency and amplitude structure of the conserved-quantity dynamics
/// for the demonstrated scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceSolutionParams {
    /// `sqrt(1 - omega^2 h^2 / 4)`
    pub a: f64,
    /// `sqrt(1 - omega^2 h^2 / 2)`
    pub b: f64,
    /// `a omega`
    pub omega_tilde: f64,
    /// `F(omega h)`
    pub t_tilde_rate: f64,
}

impl ReferenceSolutionParams {
    pub fn new(p: &FlowParams) -> Result<Self> {
        let x = p.omega_h();
        let b2 = 1.0 - x * x / 2.0;
        if b2 <= 0.0 {
            return Err(Error::DomainError(format!("|omega h| = {} must be below sqrt(2)", x.abs())));
        }
        let a = (1.0 - x * x / 4.0).sqrt();
        Ok(ReferenceSolutionParams {
            a,
            b: b2.sqrt(),
            omega_tilde: a * p.omega,
            t_tilde_rate: factor_f(x)?,
        })
    }
}

/// `x1' = p x2`, `x2' = -q x1`, `x3' = gamma x1 x2`: the shape of every
/// field `X_{H_c,G_c}` met here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalForm {
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
}

impl NormalForm {
    /// Reads `(p, q, gamma)` off `X_{H_c,G_c}` with `h` set to its value.
    pub fn from_pair(h_c: &Poly, g_c: &Poly, h: f64) -> Result<Self> {
        let field = lv_pair(h_c, g_c);
        let mono = |x1: u8, x2: u8| Monomial::new([x1, x2, 0, 0]);
        let read = |component: &Poly, m: Monomial| -> Result<f64> {
            let mut value = 0.0;
            for (mono, c) in component.terms() {
                let mut phase = mono.exponents();
                let e = phase[Var::H.index()];
                phase[Var::H.index()] = 0;
                if Monomial::new(phase) != m {
                    return Err(Error::InvalidArgument(format!(
                        "field {field} is not of linear-oscillator form"
                    )));
                }
                value += to_f64(c) * h.powi(e as i32);
            }
            Ok(value)
        };
        let [c1, c2, c3] = &field.components;
        Ok(NormalForm {
            p: read(c1, mono(0, 1))?,
            q: -read(c2, mono(1, 0))?,
            gamma: read(c3, mono(1, 1))?,
        })
    }

    pub fn omega_tilde(&self) -> Result<f64> {
        let w2 = self.p * self.q;
        if !(w2 > 0.0) || self.p == 0.0 {
            return Err(Error::DomainError(format!("normal form {self:?} does not oscillate")));
        }
        Ok(w2.sqrt())
    }

    /// `gamma / (2p)`, the ratio by which `x3` follows `x1^2`.
    pub fn kappa(&self) -> f64 {
        self.gamma / (2.0 * self.p)
    }

    /// Exact solution at time `t`.
    pub fn solve(&self, t: f64, s0: &State) -> Result<State> {
        let w = self.omega_tilde()?;
        let (x1, x2, x3) = (s0.x1, s0.x2, s0.x3);
        let (sn, cs) = (w * t).sin_cos();
        let (sn2, cs2) = (2.0 * w * t).sin_cos();
        let k = self.kappa();
        let spread = self.p * self.p * x2 * x2 / (2.0 * w * w);
        let x3t = k * ((0.5 * x1 * x1 - spread) * cs2 + self.p * x1 * x2 / w * sn2 - 0.5 * x1 * x1 + spread)
            + x3;
        Ok(State {
            x1: x1 * cs + self.p * x2 / w * sn,
            x2: x2 * cs - self.q * x1 / w * sn,
            x3: x3t,
            t: s0.t + t,
        })
    }
}

fn original_form(p: &FlowParams) -> Result<NormalForm> {
    let hs = hamiltonians(p)?;
    NormalForm::from_pair(&hs.h, &hs.g, p.h)
}

fn conserved_form(p: &FlowParams, label: &str) -> Result<NormalForm> {
    if !NAMBU_SCHEMES.contains(&label) {
        return Err(Error::UnknownScheme(label.to_string()));
    }
    let pair = conserved_pair(label, p)?;
    NormalForm::from_pair(&pair.h_c, &pair.g_c, p.h)
}

/// Exact solution of the original Nambu equations, `t` after `s0`.
pub fn exact_original(t: f64, s0: &State, p: &FlowParams) -> Result<State> {
    original_form(p)?.solve(t, s0)
}

/// Exact solution of the Nambu equations generated by the scheme's
/// conserved pair.
pub fn exact_conserved(t: f64, s0: &State, p: &FlowParams, label: &str) -> Result<State> {
    conserved_form(p, label)?.solve(t, s0)
}

/// Exact solution of the shadow dynamics: the conserved-pair dynamics run
/// at the rescaled time `F(omega h) t`.
pub fn exact_shadow(t: f64, s0: &State, p: &FlowParams, label: &str) -> Result<State> {
    let rate = factor_f(p.omega_h())?;
    let mut s = conserved_form(p, label)?.solve(rate * t, s0)?;
    s.t = s0.t + t;
    Ok(s)
}

/// Precomputed reference solutions for one configuration, for evaluation
/// at many times.
#[derive(Clone, Debug)]
pub struct ReferenceSolutions {
    original: NormalForm,
    conserved: NormalForm,
    rate: f64,
    s0: State,
}

impl ReferenceSolutions {
    pub fn new(s0: &State, p: &FlowParams, label: &str) -> Result<Self> {
        Ok(ReferenceSolutions {
            original: original_form(p)?,
            conserved: conserved_form(p, label)?,
            rate: factor_f(p.omega_h())?,
            s0: *s0,
        })
    }

    pub fn original(&self, t: f64) -> State {
        self.original.solve(t - self.s0.t, &self.s0).expect("validated")
    }

    pub fn conserved(&self, t: f64) -> State {
        self.conserved.solve(t - self.s0.t, &self.s0).expect("validated")
    }

    pub fn shadow(&self, t: f64) -> State {
        let mut s = self.conserved.solve(self.rate * (t - self.s0.t), &self.s0).expect("validated");
        s.t = t;
        s
    }
}

/// The exact shadow pair `(F^alpha H_c, F^(1-alpha) G_c)` with `F = F(omega h)`.
pub fn exact_shadow_pair(label: &str, p: &FlowParams, alpha: f64) -> Result<(Poly, Poly)> {
    let pair = conserved_pair(label, p)?;
    let f = factor_f(p.omega_h())?;
    let scale = |e: f64| {
        rational_from_f64(f.powf(e)).ok_or_else(|| Error::DomainError(format!("alpha = {alpha} is not finite")))
    };
    Ok((pair.h_c.scale(&scale(alpha)?), pair.g_c.scale(&scale(1.0 - alpha)?)))
}

/// `(t, f(s) - f(s0))` along a trajectory; `h` in `observable` takes the
/// trajectory's step size.
pub fn drift_series(traj: &Trajectory, observable: &Poly) -> Vec<(f64, f64)> {
    let f = observable.compile();
    let h = traj.params.h;
    let Some(first) = traj.samples.first() else {
        return Vec::new();
    };
    let f0 = f.eval(&first.point(h));
    traj.samples.iter().map(|s| (s.t, f.eval(&s.point(h)) - f0)).collect()
}

/// Largest `|drift|` of a series.
pub fn max_abs_drift(series: &[(f64, f64)]) -> f64 {
    series.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max)
}

/// Largest drift of `H_c` and `G_c` over `nsteps` steps of the scheme,
/// with the pair taken from `registry`.
pub fn conservation_drift(
    registry: &ConservedRegistry,
    label: &str,
    p: &FlowParams,
    s0: &State,
    nsteps: usize,
) -> Result<(f64, f64)> {
    let pair = registry.conserved_pair(label, &OscillatorParams::from_f64(p.m, p.omega)?)?;
    let integrator = crate::flows::Integrator::new(&SplitScheme::builtin(label)?, p);
    let (hc, gc) = (pair.h_c.compile(), pair.g_c.compile());
    let (h0, g0) = (hc.eval(&s0.point(p.h)), gc.eval(&s0.point(p.h)));
    let (mut dh, mut dg) = (0.0f64, 0.0f64);
    let mut s = *s0;
    for _ in 0..nsteps {
        s = integrator.step(s);
        let pt = s.point(p.h);
        dh = dh.max((hc.eval(&pt) - h0).abs());
        dg = dg.max((gc.eval(&pt) - g0).abs());
    }
    Ok((dh, dg))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeatMetrics {
    pub max_diff: f64,
    pub argmax_t: f64,
    /// `2 argmax_t`, valid when the difference starts at zero.
    pub envelope_period: f64,
}

/// Maximum of `|x3(t) - reference(t)|` along the trajectory and the
/// envelope period implied by where it is reached.
///
/// Fails with `InsufficientSpan` when there are fewer than three samples
/// or the maximum sits on the last sample, since then the envelope has not
/// been seen to turn over.
pub fn beat_metrics(numeric: &Trajectory, reference: impl Fn(f64) -> f64) -> Result<BeatMetrics> {
    let n = numeric.samples.len();
    if n < 3 {
        return Err(Error::InsufficientSpan(format!("{n} samples")));
    }
    let (idx, max_diff) = numeric
        .samples
        .iter()
        .map(|s| (s.x3 - reference(s.t)).abs())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    if idx == n - 1 {
        return Err(Error::InsufficientSpan(format!(
            "difference still growing at t = {}",
            numeric.samples[idx].t
        )));
    }
    let argmax_t = numeric.samples[idx].t - numeric.samples[0].t;
    Ok(BeatMetrics {
        max_diff,
        argmax_t,
        envelope_period: 2.0 * argmax_t,
    })
}

/// Predicted beat period `2 pi / |2 theta/h - 2 omega|` between the exact
/// `x3` oscillation and the integrator's, with `theta` the per-step angle.
pub fn predicted_beat_period(p: &FlowParams) -> Result<f64> {
    let theta = crate::flows::rotation_angle(p)?;
    Ok(2.0 * std::f64::consts::PI / (2.0 * theta / p.h - 2.0 * p.omega).abs())
}
