//! Exact sparse polynomials in the phase variables `x1, x2, x3` and the
//! formal step-size variable `h`, with arbitrary-precision rational
//! coefficients.
//!
//! Mass and frequency are not variables of the ring. They are substituted as
//! rational numbers when Hamiltonians are built, so the coefficient domain
//! stays a field. The step size `h` is a variable so that collecting the
//! `O(h^k)` part of an expansion is a filter on exponents.
//!
//! Products whose total degree exceeds [`DEGREE_CAP`] are rejected with
//! [`Error::DegreeCapExceeded`] instead of being truncated.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Maximum total degree (phase variables plus `h`) of any stored monomial.
pub const DEGREE_CAP: u32 = 12;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The exact binary value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err("empty number"));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("not a number"));
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err("not a number"))?
    };
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let r = Rational::new(n, d);
    Ok(if neg { -r } else { r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X1,
    X2,
    X3,
    H,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X1, Var::X2, Var::X3, Var::H];
    pub const PHASE: [Var; 3] = [Var::X1, Var::X2, Var::X3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::H => "h",
        }
    }
}

/// Exponent vector over `(x1, x2, x3, h)`.
///
/// Ordered graded-lexicographically: lower total degree first, ties broken
/// by comparing exponents of `x1`, then `x2`, `x3`, `h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; 4],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; 4] };

    pub fn new(exps: [u8; 4]) -> Self {
        Monomial { exps }
    }

    pub fn var(v: Var) -> Self {
        let mut exps = [0; 4];
        exps[v.index()] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> [u8; 4] {
        self.exps
    }

    pub fn exponent(&self, v: Var) -> u8 {
        self.exps[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Degree in `x1, x2, x3` only.
    pub fn phase_degree(&self) -> u32 {
        self.exps[..3].iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; 4]
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (e, o) in exps.iter_mut().zip(other.exps) {
            *e += o;
        }
        Monomial { exps }
    }

    fn with_exponent(&self, v: Var, e: u8) -> Monomial {
        let mut exps = self.exps;
        exps[v.index()] = e;
        Monomial { exps }
    }

    /// All monomials in `x1, x2, x3` (no `h`) of total degree `<= max_degree`,
    /// in ascending order.
    pub fn phase_monomials(max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                for c in 0..=(max_degree - a - b) {
                    out.push(Monomial::new([a as u8, b as u8, c as u8, 0]));
                }
            }
        }
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                1 => write!(f, "{}", v.name())?,
                _ => write!(f, "{}^{}", v.name(), e)?,
            }
        }
        Ok(())
    }
}

/// Sparse polynomial: a map from monomial to nonzero rational coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::ONE)
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Rational::one(), Monomial::var(v))
    }

    pub fn x1() -> Self {
        Poly::var(Var::X1)
    }

    pub fn x2() -> Self {
        Poly::var(Var::X2)
    }

    pub fn x3() -> Self {
        Poly::var(Var::X3)
    }

    pub fn h() -> Self {
        Poly::var(Var::H)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no monomial other than `1` is present.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(v) as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let degree = ma.degree() + mb.degree();
                if degree > DEGREE_CAP {
                    return Err(Error::DegreeCapExceeded {
                        degree,
                        cap: DEGREE_CAP,
                    });
                }
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn try_pow(&self, n: u32) -> Result<Poly> {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Formal partial derivative.
    pub fn diff(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            out.add_term(m.with_exponent(v, e - 1), c * int(e as i64));
        }
        out
    }

    /// Evaluates at `(x1, x2, x3, h)` with coefficients rounded to `f64`.
    pub fn eval(&self, point: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = to_f64(c);
                for (x, &e) in point.iter().zip(m.exps.iter()) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Drops every term whose `h` exponent exceeds `order`.
    pub fn truncate_h(&self, order: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(Var::H) as u32 <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `h^k`, as an `h`-free polynomial.
    pub fn h_coefficient(&self, k: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(Var::H) as u32 == k)
                .map(|(m, c)| (m.with_exponent(Var::H, 0), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by `h^k`.
    pub fn times_h_pow(&self, k: u32) -> Result<Poly> {
        self.try_mul(&Poly::term(
            Rational::one(),
            Monomial::ONE.with_exponent(Var::H, k as u8),
        ))
    }

    /// Replaces every occurrence of `v` by `replacement`.
    pub fn substitute(&self, v: Var, replacement: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        let mut powers = vec![Poly::one()];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().try_mul(replacement)?;
                powers.push(next);
            }
            let rest = Poly::term(c.clone(), m.with_exponent(v, 0));
            out += &rest.try_mul(&powers[e])?;
        }
        Ok(out)
    }

    /// Removes every monomial free of `x1, x2, x3` (constants, possibly
    /// carrying powers of `h`).
    pub fn drop_phase_constants(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.phase_degree() > 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Returns `c` with `self == c * other`, if such a rational exists.
    /// Both operands must be nonzero.
    pub fn ratio_to(&self, other: &Poly) -> Option<Rational> {
        if self.is_zero() || other.is_zero() || self.len() != other.len() {
            return None;
        }
        let (m0, c0) = other.terms.iter().next()?;
        let ratio = self.terms.get(m0)? / c0;
        if other.scale(&ratio) == *self {
            Some(ratio)
        } else {
            None
        }
    }

    /// A float-coefficient copy for fast repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (to_f64(c), m.exps))
                .collect(),
        }
    }
}

/// Evaluation-only form of a [`Poly`] with `f64` coefficients.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, [u8; 4])>,
}

impl CompiledPoly {
    pub fn eval(&self, point: &[f64; 4]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (x, &e) in point.iter().zip(exps.iter()) {
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    /// Parses the grammar produced by `Display`: signed terms joined by
    /// `+`/`-`, each a `*`-separated product of rationals and powers of
    /// `x1`, `x2`, `x3`, `h`.
    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input,
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            input: self.input.to_string(),
            reason: format!("{} at byte {}", reason.into(), self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Poly> {
        let mut out = Poly::zero();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -Rational::one()
            }
            Some(b'+') => {
                self.pos += 1;
                Rational::one()
            }
            Some(_) => Rational::one(),
            None => return Err(self.error("empty input")),
        };
        loop {
            let t = self.term()?;
            out += &t.scale(&sign);
            match self.peek() {
                None => break,
                Some(b'+') => sign = Rational::one(),
                Some(b'-') => sign = -Rational::one(),
                Some(c) => return Err(self.error(format!("unexpected `{}`", c as char))),
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut coeff = Rational::one();
        let mut mono = Monomial::ONE;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => coeff *= self.number()?,
                Some(b'x') | Some(b'h') => {
                    let v = self.variable()?;
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.integer()?;
                    }
                    let e = e + mono.exponent(v) as u32;
                    if e > DEGREE_CAP {
                        return Err(self.error("exponent above degree cap"));
                    }
                    mono = mono.with_exponent(v, e as u8);
                }
                _ => return Err(self.error("expected a number or variable")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if mono.degree() > DEGREE_CAP {
            return Err(self.error("monomial above degree cap"));
        }
        Ok(Poly::term(coeff, mono))
    }

    fn number(&mut self) -> Result<Rational> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        let num = parse_rational(&self.input[start..self.pos])?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let den = parse_rational(&self.input[start..self.pos])?;
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            return Ok(num / den);
        }
        Ok(num)
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected an exponent"))
    }

    fn variable(&mut self) -> Result<Var> {
        let rest = &self.input[self.pos..];
        for v in [Var::X1, Var::X2, Var::X3, Var::H] {
            if rest.starts_with(v.name()) {
                self.pos += v.name().len();
                return Ok(v);
            }
        }
        Err(self.error("unknown variable"))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Panics if the product exceeds [`DEGREE_CAP`]; use [`Poly::try_mul`] to
/// handle that case.
impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        match self.try_mul(rhs) {
            Ok(p) => p,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn add_cancels_and_merges() {
        assert_eq!(&p("x1^2 + h") + &p("-h"), p("x1^2"));
        let hsum = &p("1/2*x2^2 + 1/2*x3") + &p("x3 - x1^2");
        assert_eq!(hsum, p("1/2*x2^2 + 3/2*x3 - x1^2"));
        assert_eq!(&p("x1*x2 + 3") + &Poly::zero(), p("x1*x2 + 3"));
    }

    #[test]
    fn mul_basics() {
        assert_eq!(&p("x1 + x2") * &p("x1 - x2"), p("x1^2 - x2^2"));
        assert_eq!(&Poly::h() * &Poly::h(), p("h^2"));
        let xy = &Poly::x1() * &Poly::x2();
        assert_eq!(xy.terms().next().unwrap().0.exponents(), [1, 1, 0, 0]);
    }

    #[test]
    fn mul_rejects_degree_overflow() {
        let a = p("x1^7");
        let b = p("x2^6");
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::DegreeCapExceeded { degree: 13, cap: 12 })
        ));
        assert!(a.try_mul(&p("x2^5")).is_ok());
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("1/2*x2^2").diff(Var::X2), p("x2"));
        assert_eq!(p("x3 - x1^2").diff(Var::X1), p("-2*x1"));
        assert!(p("x3").diff(Var::X2).is_zero());
    }

    #[test]
    fn evaluation() {
        let h = p("1/2*x2^2 + 1/2*x3");
        let g = p("x3 - x1^2");
        assert_eq!(h.eval(&[1.0, 1.0, 1.0, 0.0]), 1.0);
        assert_eq!(g.eval(&[1.0, 1.0, 1.0, 0.0]), 0.0);
        let gc = &g + &p("1/4*h^2*x2^2");
        assert!((gc.eval(&[1.0, 1.0, 1.0, 0.1]) - 0.0025).abs() < 1e-15);
        assert_eq!(gc.compile().eval(&[1.0, 1.0, 1.0, 0.1]), gc.eval(&[1.0, 1.0, 1.0, 0.1]));
    }

    #[test]
    fn truncation() {
        assert_eq!(p("x1 + h*x2 + h^3*x3").truncate_h(2), p("x1 + h*x2"));
        let h = p("1/2*x2^2 + 1/2*x3");
        assert_eq!(h.truncate_h(0), h);
        assert!(p("1/6*h^3*x1*x2").truncate_h(2).is_zero());
    }

    #[test]
    fn rendering_is_descending_grlex() {
        assert_eq!(p("1/2*x3 + 1/2*x2^2").to_string(), "1/2*x2^2 + 1/2*x3");
        assert_eq!(p("x3 - x1^2").to_string(), "-x1^2 + x3");
        assert_eq!(p("h^2*x2^2 + x1*x2 + 3").to_string(), "x2^2*h^2 + x1*x2 + 3");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(p("-1/12*x1^2 - 2").to_string(), "-1/12*x1^2 - 2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<Poly>().is_err());
        assert!("x4".parse::<Poly>().is_err());
        assert!("x1 +".parse::<Poly>().is_err());
        assert!("1/0*x1".parse::<Poly>().is_err());
        assert!("x1^13".parse::<Poly>().is_err());
    }

    #[test]
    fn parse_accepts_decimals_and_repeats() {
        assert_eq!(p("0.5*x1*x1"), p("1/2*x1^2"));
        assert_eq!(parse_rational("-0.125").unwrap(), rational(-1, 8));
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
    }

    #[test]
    fn substitution_and_constants() {
        let q = p("x3*h^2 + x2^2");
        let r = q.substitute(Var::X3, &p("x1^2 + 5")).unwrap();
        assert_eq!(r, p("x1^2*h^2 + 5*h^2 + x2^2"));
        assert_eq!(r.drop_phase_constants(), p("x1^2*h^2 + x2^2"));
    }

    #[test]
    fn ratio() {
        assert_eq!(p("2*x1 + 4*x2").ratio_to(&p("x1 + 2*x2")), Some(int(2)));
        assert_eq!(p("2*x1 + 4*x2").ratio_to(&p("x1 + x2")), None);
    }

    #[test]
    fn h_grading() {
        let q = p("x1 + h*x2 + 3*h^2*x1*x3");
        assert_eq!(q.h_coefficient(2), p("3*x1*x3"));
        assert_eq!(q.h_coefficient(0), p("x1"));
        assert_eq!(p("x1").times_h_pow(2).unwrap(), p("x1*h^2"));
    }
}
