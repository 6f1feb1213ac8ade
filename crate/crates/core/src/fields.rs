//! Liouville vector fields on `(x1, x2, x3)` with polynomial components.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::brackets::gradient;
use crate::error::Result;
use crate::poly::{Poly, Rational, Var};

/// A derivation `P1 d/dx1 + P2 d/dx2 + P3 d/dx3`.
///
/// Equality is componentwise, independent of how the field was built.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub components: [Poly; 3],
}

impl VectorField {
    pub fn new(components: [Poly; 3]) -> Self {
        VectorField { components }
    }

    pub fn zero() -> Self {
        VectorField::default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// `f -> sum_i P_i df/dx_i`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (c, v) in self.components.iter().zip(Var::PHASE) {
            if c.is_zero() {
                continue;
            }
            out += &(c * &f.diff(v));
        }
        out
    }

    /// Same as [`apply`](Self::apply) but reports degree-cap overflow.
    pub fn try_apply(&self, f: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (c, v) in self.components.iter().zip(Var::PHASE) {
            out += &c.try_mul(&f.diff(v))?;
        }
        Ok(out)
    }

    /// `[self, other]`, i.e. `self other - other self` as operators.
    pub fn commutator(&self, other: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            &self.apply(&other.components[i]) - &other.apply(&self.components[i])
        }))
    }

    pub fn divergence(&self) -> Poly {
        let mut out = Poly::zero();
        for (c, v) in self.components.iter().zip(Var::PHASE) {
            out += &c.diff(v);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> VectorField {
        VectorField::new(self.components.clone().map(|p| p.scale(c)))
    }

    /// Multiplies every component by a polynomial (typically a power of `h`).
    pub fn try_times(&self, p: &Poly) -> Result<VectorField> {
        let [a, b, c] = &self.components;
        Ok(VectorField::new([a.try_mul(p)?, b.try_mul(p)?, c.try_mul(p)?]))
    }

    pub fn h_coefficient(&self, k: u32) -> VectorField {
        VectorField::new(self.components.clone().map(|p| p.h_coefficient(k)))
    }

    pub fn truncate_h(&self, order: u32) -> VectorField {
        VectorField::new(self.components.clone().map(|p| p.truncate_h(order)))
    }
}

/// `X_H = dH/dx2 d/dx1 - dH/dx1 d/dx2`, the canonical two-variable field.
pub fn lv_single(hamiltonian: &Poly) -> VectorField {
    VectorField::new([
        hamiltonian.diff(Var::X2),
        -hamiltonian.diff(Var::X1),
        Poly::zero(),
    ])
}

/// `X_{A,B}` with component `i` equal to `eps_ijk dA/dx_j dB/dx_k`, so that
/// `X_{A,B} f = {f, A, B}`.
pub fn lv_pair(a: &Poly, b: &Poly) -> VectorField {
    let ga = gradient(a);
    let gb = gradient(b);
    let cross = |j: usize, k: usize| &(&ga[j] * &gb[k]) - &(&ga[k] * &gb[j]);
    VectorField::new([cross(1, 2), cross(2, 0), cross(0, 1)])
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            &self.components[i] + &rhs.components[i]
        }))
    }
}

impl Add for VectorField {
    type Output = VectorField;
    fn add(self, rhs: VectorField) -> VectorField {
        &self + &rhs
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            &self.components[i] - &rhs.components[i]
        }))
    }
}

impl Sub for VectorField {
    type Output = VectorField;
    fn sub(self, rhs: VectorField) -> VectorField {
        &self - &rhs
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField::new(self.components.clone().map(|p| -p))
    }
}

impl std::iter::Sum for VectorField {
    fn sum<I: Iterator<Item = VectorField>>(iter: I) -> VectorField {
        iter.fold(VectorField::zero(), |acc, v| &acc + &v)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.components;
        write!(f, "({a}) d/dx1 + ({b}) d/dx2 + ({c}) d/dx3")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn field(a: &str, b: &str, c: &str) -> VectorField {
        VectorField::new([p(a), p(b), p(c)])
    }

    // m = omega = 1
    fn pieces() -> (Poly, Poly, Poly, Poly) {
        (p("1/2*x2^2"), p("1/2*x3"), p("x3"), p("-x1^2"))
    }

    #[test]
    fn single_hamiltonian_fields() {
        assert_eq!(lv_single(&p("1/2*x2^2")), field("x2", "0", "0"));
        assert_eq!(lv_single(&p("1/2*x1^2")), field("0", "-x1", "0"));
        assert!(lv_single(&p("7/3")).is_zero());
    }

    #[test]
    fn pair_fields() {
        let (a, b, c, d) = pieces();
        let h = &a + &b;
        let g = &c + &d;
        assert_eq!(lv_pair(&h, &g), field("x2", "-x1", "2*x1*x2"));
        assert_eq!(lv_pair(&a, &c), field("x2", "0", "0"));
        assert_eq!(lv_pair(&b, &d), field("0", "-x1", "0"));
        assert_eq!(lv_pair(&a, &d), field("0", "0", "2*x1*x2"));
        assert!(lv_pair(&b, &c).is_zero());
    }

    #[test]
    fn apply_examples() {
        let (a, b, c, d) = pieces();
        let h = &a + &b;
        let g = &c + &d;
        let xhg = lv_pair(&h, &g);
        assert!(xhg.apply(&h).is_zero());
        assert!(xhg.apply(&g).is_zero());
        assert_eq!(lv_pair(&a, &c).apply(&Poly::x1()), Poly::x2());
        for (i, v) in Var::PHASE.into_iter().enumerate() {
            assert_eq!(xhg.apply(&Poly::var(v)), xhg.components[i]);
        }
    }

    #[test]
    fn commutator_examples() {
        let (a, b, c, d) = pieces();
        let x1 = lv_pair(&a, &c);
        let x2 = lv_pair(&b, &d);
        let x3 = lv_pair(&a, &d);
        assert_eq!(x1.commutator(&x2), field("x1", "-x2", "0"));
        assert!(x1.commutator(&x1.commutator(&x3)).is_zero());
        assert!(x3.commutator(&x1.commutator(&x2)).is_zero());
    }

    #[test]
    fn divergence_free() {
        let f = lv_pair(&p("x1^2*x3 + x2"), &p("x2^3 - x1*x3"));
        assert!(f.divergence().is_zero());
    }

    #[test]
    fn rendering() {
        let f = field("x2", "-x1", "2*x1*x2");
        assert_eq!(f.to_string(), "(x2) d/dx1 + (-x1) d/dx2 + (2*x1*x2) d/dx3");
        assert_eq!(f.scale(&int(0)), VectorField::zero());
    }
}
