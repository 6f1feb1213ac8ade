//! Splitting schemes: ordered stage lists of `(generator, fraction)`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{rational, Rational};

/// The sub-flow generators. `X1`, `X2`, `X3` split the Nambu field
/// `X_{H,G}`; `T` and `V` split the canonical field `X_H` of the
/// two-variable oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X1,
    X2,
    X3,
    T,
    V,
}

impl Generator {
    pub fn symbol(self) -> &'static str {
        match self {
            Generator::X1 => "1",
            Generator::X2 => "2",
            Generator::X3 => "3",
            Generator::T => "T",
            Generator::V => "V",
        }
    }

    fn from_char(c: char) -> Option<Generator> {
        Some(match c {
            '1' => Generator::X1,
            '2' => Generator::X2,
            '3' => Generator::X3,
            'T' => Generator::T,
            'V' => Generator::V,
            _ => return None,
        })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub generator: Generator,
    pub fraction: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitScheme {
    pub label: String,
    pub stages: Vec<Stage>,
}

/// The six palindromic five-stage compositions of `X1, X2, X3`.
pub const NAMBU_SCHEMES: [&str; 6] = ["12321", "13231", "31213", "21312", "23132", "32123"];

/// Position and velocity Verlet on `(x1, x2)`.
pub const VERLET_SCHEMES: [&str; 2] = ["TVT", "VTV"];

impl SplitScheme {
    /// Builds a scheme from an explicit stage list. Every generator's
    /// fractions must sum to one.
    pub fn new(label: impl Into<String>, stages: Vec<Stage>) -> Result<Self> {
        let label = label.into();
        if stages.is_empty() {
            return Err(Error::InvalidArgument(format!("scheme {label} has no stages")));
        }
        let scheme = SplitScheme { label, stages };
        for g in scheme.generators() {
            let total: Rational = scheme
                .stages
                .iter()
                .filter(|s| s.generator == g)
                .map(|s| s.fraction.clone())
                .sum();
            if !total.is_one() {
                return Err(Error::InvalidArgument(format!(
                    "fractions of {g} in scheme {} sum to {total}, not 1",
                    scheme.label
                )));
            }
        }
        Ok(scheme)
    }

    /// One of the built-in labels: the six Nambu palindromes, `TVT`, `VTV`.
    ///
    /// A three-letter palindrome `aba` gets fractions `1/2, 1, 1/2`; a
    /// five-letter palindrome `abcba` gets `1/2, 1/2, 1, 1/2, 1/2`.
    pub fn builtin(label: &str) -> Result<Self> {
        if !NAMBU_SCHEMES.contains(&label) && !VERLET_SCHEMES.contains(&label) {
            return Err(Error::UnknownScheme(label.to_string()));
        }
        let gens: Vec<Generator> = label.chars().filter_map(Generator::from_char).collect();
        let mid = gens.len() / 2;
        let stages = gens
            .iter()
            .enumerate()
            .map(|(i, &g)| Stage {
                generator: g,
                fraction: if i == mid { Rational::one() } else { rational(1, 2) },
            })
            .collect();
        SplitScheme::new(label, stages)
    }

    /// `exp(h X_g)` as a one-stage scheme.
    pub fn single(g: Generator) -> Self {
        SplitScheme {
            label: g.symbol().to_string(),
            stages: vec![Stage {
                generator: g,
                fraction: Rational::one(),
            }],
        }
    }

    pub fn nambu_schemes() -> Vec<SplitScheme> {
        NAMBU_SCHEMES
            .iter()
            .map(|l| SplitScheme::builtin(l).expect("built-in label"))
            .collect()
    }

    pub fn is_nambu(&self) -> bool {
        self.stages
            .iter()
            .all(|s| matches!(s.generator, Generator::X1 | Generator::X2 | Generator::X3))
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.stages.len();
        (0..n / 2).all(|i| self.stages[i] == self.stages[n - 1 - i])
    }

    /// Distinct generators in order of first appearance.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        for s in &self.stages {
            if !out.contains(&s.generator) {
                out.push(s.generator);
            }
        }
        out
    }

    /// Renders the composition, e.g. `e^(1/2 h X1) o e^(h X2) o ...`.
    pub fn composition(&self) -> String {
        self.stages
            .iter()
            .map(|s| {
                if s.fraction.is_one() {
                    format!("e^(h {})", s.generator)
                } else if s.fraction.is_zero() {
                    "1".to_string()
                } else {
                    format!("e^({} h {})", s.fraction, s.generator)
                }
            })
            .collect::<Vec<_>>()
            .join(" o ")
    }
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phi^{}", self.label)
    }
}
