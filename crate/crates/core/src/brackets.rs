//! Poisson and Nambu brackets, and residual checks for the Jacobi and
//! fundamental identities.
//!
//! The Poisson bracket acts on `(x1, x2)` only; `x3` and `h` are spectators.
//! The Nambu bracket is the Jacobian determinant with respect to
//! `(x1, x2, x3)`, with `h` a spectator constant.

use crate::poly::{Poly, Var};

/// `{a, b} = da/dx1 * db/dx2 - da/dx2 * db/dx1`.
pub fn poisson(a: &Poly, b: &Poly) -> Poly {
    &(&a.diff(Var::X1) * &b.diff(Var::X2)) - &(&a.diff(Var::X2) * &b.diff(Var::X1))
}

/// `{a, b, c} = d(a, b, c) / d(x1, x2, x3)`.
pub fn nambu(a: &Poly, b: &Poly, c: &Poly) -> Poly {
    let ga = gradient(a);
    let gb = gradient(b);
    let gc = gradient(c);
    let minor = |i: usize, j: usize| &(&gb[i] * &gc[j]) - &(&gb[j] * &gc[i]);
    let mut out = &ga[0] * &minor(1, 2);
    out -= &(&ga[1] * &minor(0, 2));
    out += &(&ga[2] * &minor(0, 1));
    out
}

pub(crate) fn gradient(a: &Poly) -> [Poly; 3] {
    Var::PHASE.map(|v| a.diff(v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketResidualReport {
    pub residual: Poly,
    pub is_zero: bool,
    pub inputs: Vec<String>,
}

impl BracketResidualReport {
    fn new(residual: Poly, inputs: &[&Poly]) -> Self {
        BracketResidualReport {
            is_zero: residual.is_zero(),
            residual,
            inputs: inputs.iter().map(|p| p.to_string()).collect(),
        }
    }
}

/// `{{a,b},c} + {{b,c},a} + {{c,a},b}`.
pub fn jacobi_residual(a: &Poly, b: &Poly, c: &Poly) -> BracketResidualReport {
    let mut r = poisson(&poisson(a, b), c);
    r += &poisson(&poisson(b, c), a);
    r += &poisson(&poisson(c, a), b);
    BracketResidualReport::new(r, &[a, b, c])
}

/// `{{f,e,q},c,d} - {{f,c,d},e,q} - {f,{e,c,d},q} - {f,e,{q,c,d}}`.
pub fn fundamental_identity_residual(
    f: &Poly,
    e: &Poly,
    q: &Poly,
    c: &Poly,
    d: &Poly,
) -> BracketResidualReport {
    let mut r = nambu(&nambu(f, e, q), c, d);
    r -= &nambu(&nambu(f, c, d), e, q);
    r -= &nambu(f, &nambu(e, c, d), q);
    r -= &nambu(f, e, &nambu(q, c, d));
    BracketResidualReport::new(r, &[f, e, q, c, d])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson(&Poly::x1(), &Poly::x2()), Poly::one());
        assert_eq!(poisson(&p("1/2*x2^2"), &p("1/2*x1^2")), p("-x1*x2"));
        let a = p("x1^2*x3 + h*x2");
        assert!(poisson(&a, &a).is_zero());
    }

    #[test]
    fn poisson_ignores_x3_and_h() {
        assert!(poisson(&Poly::x3(), &p("x1^2 + x2")).is_zero());
        assert_eq!(poisson(&p("h*x1"), &p("x3*x2")), p("h*x3"));
    }

    #[test]
    fn nambu_examples() {
        assert_eq!(nambu(&Poly::x1(), &Poly::x2(), &Poly::x3()), Poly::one());
        let h = p("1/2*x2^2 + 1/2*x3");
        let g = p("x3 - x1^2");
        assert_eq!(nambu(&Poly::x1(), &h, &g), p("x2"));
        assert_eq!(nambu(&Poly::x2(), &h, &g), p("-x1"));
        assert_eq!(nambu(&Poly::x3(), &h, &g), p("2*x1*x2"));
    }

    #[test]
    fn nambu_h_is_spectator() {
        let r = nambu(&p("h*x1"), &p("h^2*x2"), &Poly::x3());
        assert_eq!(r, p("h^3"));
        assert!(nambu(&Poly::h(), &Poly::x2(), &Poly::x3()).is_zero());
    }

    #[test]
    fn jacobi_examples() {
        assert!(jacobi_residual(&Poly::x1(), &Poly::x2(), &p("x1*x2")).is_zero);
        assert!(jacobi_residual(&p("1/2*x2^2"), &p("1/2*x1^2"), &p("x1*x2")).is_zero);
        let h = p("1/2*x2^2 + 1/2*x3");
        let g = p("x3 - x1^2");
        let rep = jacobi_residual(&h, &g, &Poly::x3());
        assert!(rep.is_zero);
        assert_eq!(rep.inputs.len(), 3);
    }

    #[test]
    fn fundamental_identity_examples() {
        let r = fundamental_identity_residual(
            &Poly::x1(),
            &Poly::x2(),
            &Poly::x3(),
            &Poly::x1(),
            &Poly::x3(),
        );
        assert!(r.is_zero);
        let a = p("1/2*x2^2");
        let b = p("1/2*x3");
        let c = Poly::x3();
        let d = p("-x1^2");
        assert!(fundamental_identity_residual(&Poly::x3(), &a, &c, &b, &d).is_zero);
        let d2 = d.scale(&rational(3, 7));
        assert!(fundamental_identity_residual(&p("x1*x2"), &a, &d2, &b, &c).is_zero);
    }

    #[test]
    fn report_flags_nonzero_residual() {
        let rep = BracketResidualReport::new(Poly::x1(), &[]);
        assert!(!rep.is_zero);
    }
}
