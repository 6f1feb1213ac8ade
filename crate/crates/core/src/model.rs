//! The three-variable oscillator `(x1, x2, x3) = (q, p, q^2)`: its two
//! Hamiltonians, their separable pieces, and the split generator fields.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::fields::{lv_pair, lv_single, VectorField};
use crate::poly::{int, rational, rational_from_f64, Poly, Rational};
use crate::scheme::Generator;

/// Exact mass and angular frequency for symbolic work.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscillatorParams {
    pub m: Rational,
    pub omega: Rational,
}

impl OscillatorParams {
    pub fn new(m: Rational, omega: Rational) -> Result<Self> {
        if !m.is_positive() || !omega.is_positive() {
            return Err(Error::DomainError(format!(
                "mass and frequency must be positive (m = {m}, omega = {omega})"
            )));
        }
        Ok(OscillatorParams { m, omega })
    }

    pub fn unit() -> Self {
        OscillatorParams {
            m: Rational::one(),
            omega: Rational::one(),
        }
    }

    pub fn from_ints(m: (i64, i64), omega: (i64, i64)) -> Self {
        OscillatorParams::new(rational(m.0, m.1), rational(omega.0, omega.1))
            .expect("positive parameters")
    }

    /// Exact binary values of float parameters.
    pub fn from_f64(m: f64, omega: f64) -> Result<Self> {
        let conv = |x: f64, name: &str| {
            rational_from_f64(x).ok_or_else(|| Error::DomainError(format!("{name} = {x} is not finite")))
        };
        OscillatorParams::new(conv(m, "m")?, conv(omega, "omega")?)
    }

    pub fn omega_sq(&self) -> Rational {
        &self.omega * &self.omega
    }

    /// The parameter samples at which identities polynomial in `(m, omega)`
    /// are checked.
    pub fn samples() -> [OscillatorParams; 3] {
        [
            OscillatorParams::from_ints((1, 1), (1, 1)),
            OscillatorParams::from_ints((2, 1), (3, 1)),
            OscillatorParams::from_ints((1, 2), (5, 1)),
        ]
    }
}

/// `H = A + B`, `G = C + D` for the Nambu form and `T + V` for the
/// canonical two-variable form.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonians {
    pub h: Poly,
    pub g: Poly,
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
    pub t: Poly,
    pub v: Poly,
}

impl Hamiltonians {
    pub fn new(p: &OscillatorParams) -> Self {
        let half = rational(1, 2);
        let w2 = p.omega_sq();
        let a = Poly::x2().try_pow(2).unwrap().scale(&(&half / &p.m));
        let b = Poly::x3().scale(&(&half * &p.m * &w2));
        let c = Poly::x3();
        let d = Poly::x1().try_pow(2).unwrap().scale(&int(-1));
        let t = a.clone();
        let v = Poly::x1().try_pow(2).unwrap().scale(&(&half * &p.m * &w2));
        Hamiltonians {
            h: &a + &b,
            g: &c + &d,
            a,
            b,
            c,
            d,
            t,
            v,
        }
    }

    /// The Hamiltonian pair `(P, Q)` with `X_g = X_{P,Q}`, for the three
    /// Nambu generators.
    pub fn generator_pair(&self, g: Generator) -> Option<(Poly, Poly)> {
        match g {
            Generator::X1 => Some((self.a.clone(), self.c.clone())),
            Generator::X2 => Some((self.b.clone(), self.d.clone())),
            Generator::X3 => Some((self.a.clone(), self.d.clone())),
            Generator::T | Generator::V => None,
        }
    }

    pub fn generator_field(&self, g: Generator) -> VectorField {
        match g {
            Generator::T => lv_single(&self.t),
            Generator::V => lv_single(&self.v),
            _ => {
                let (p, q) = self.generator_pair(g).expect("Nambu generator");
                lv_pair(&p, &q)
            }
        }
    }

    pub fn generators(&self) -> BTreeMap<Generator, VectorField> {
        [Generator::X1, Generator::X2, Generator::X3, Generator::T, Generator::V]
            .into_iter()
            .map(|g| (g, self.generator_field(g)))
            .collect()
    }

    pub fn nambu_field(&self) -> VectorField {
        lv_pair(&self.h, &self.g)
    }

    pub fn canonical_field(&self) -> VectorField {
        lv_single(&(&self.t + &self.v))
    }

    pub fn h_pieces(&self) -> [&Poly; 2] {
        [&self.a, &self.b]
    }

    pub fn g_pieces(&self) -> [&Poly; 2] {
        [&self.c, &self.d]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn unit_parameters() {
        let hs = Hamiltonians::new(&OscillatorParams::unit());
        assert_eq!(hs.h, p("1/2*x2^2 + 1/2*x3"));
        assert_eq!(hs.g, p("x3 - x1^2"));
        assert_eq!(hs.a, p("1/2*x2^2"));
        assert_eq!(hs.b, p("1/2*x3"));
        assert_eq!(hs.c, p("x3"));
        assert_eq!(hs.d, p("-x1^2"));
        assert_eq!(hs.v, p("1/2*x1^2"));
    }

    #[test]
    fn pieces_sum_to_hamiltonians() {
        for params in OscillatorParams::samples() {
            let hs = Hamiltonians::new(&params);
            assert_eq!(&hs.a + &hs.b, hs.h);
            assert_eq!(&hs.c + &hs.d, hs.g);
        }
        let hs = Hamiltonians::new(&OscillatorParams::from_ints((2, 1), (3, 1)));
        assert_eq!(hs.h, p("1/4*x2^2 + 9*x3"));
    }

    #[test]
    fn generators_sum_to_nambu_field() {
        for params in OscillatorParams::samples() {
            let hs = Hamiltonians::new(&params);
            let sum = &(&hs.generator_field(Generator::X1) + &hs.generator_field(Generator::X2))
                + &hs.generator_field(Generator::X3);
            assert_eq!(sum, hs.nambu_field());
            assert!(lv_pair(&hs.b, &hs.c).is_zero());
            assert_eq!(
                &hs.generator_field(Generator::T) + &hs.generator_field(Generator::V),
                hs.canonical_field()
            );
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(OscillatorParams::new(int(0), int(1)).is_err());
        assert!(OscillatorParams::from_f64(1.0, f64::NAN).is_err());
    }
}
