//! Second-order backward error analysis of splitting schemes.
//!
//! The effective generator of a composition is extracted by composing
//! truncated exponential series on the coordinate functions and taking a
//! structured logarithm, so no BCH coefficient table is transcribed. The
//! symmetric BCH expansion is kept separately as a list of nested
//! commutators; it is what the fundamental-identity rewriting works on, and
//! it must agree with the series route.
//!
//! Everything here is exact. Expansions are truncated past `h^3`, which is
//! enough to read off the `h^2` term of the effective generator and nothing
//! more.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::brackets::{nambu, poisson};
use crate::error::{Error, Result};
use crate::fields::{lv_pair, VectorField};
use crate::linalg::{self, Matrix};
use crate::model::{Hamiltonians, OscillatorParams};
use crate::observables::ConservedRegistry;
use crate::poly::{int, rational, to_f64, Monomial, Poly, Rational, Var};
pub use crate::scheme::{Generator, SplitScheme, Stage};

/// Highest power of `h` carried through the exponential series.
pub const SERIES_ORDER: u32 = 3;

/// Subset solves allowed when searching for a sparsest particular solution.
const SPARSE_SEARCH_BUDGET: usize = 200_000;

/// A pair of Hamiltonians `(P, Q)` standing for the field `X_{P,Q}`.
pub type HamPair = (Poly, Poly);

/// Coefficients of `h^0, h^1, h^2` in the effective generator
/// `v0 + h v1 + h^2 v2 + O(h^3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModifiedField {
    pub v0: VectorField,
    pub v1: VectorField,
    pub v2: VectorField,
}

impl ModifiedField {
    /// `v0 + h v1 + h^2 v2` as a single `h`-dependent field.
    pub fn generator(&self) -> Result<VectorField> {
        let h1 = self.v1.try_times(&Poly::h())?;
        let h2 = self.v2.try_times(&Poly::h().try_pow(2)?)?;
        Ok(&(&self.v0 + &h1) + &h2)
    }
}

fn exp_series(field: &VectorField, fraction: &Rational, f: &Poly, order: u32) -> Result<Poly> {
    let mut acc = f.truncate_h(order);
    let mut term = acc.clone();
    let mut coeff = Rational::one();
    for k in 1..=order {
        term = field.try_apply(&term)?.truncate_h(order - k);
        if term.is_zero() {
            break;
        }
        coeff = coeff * fraction / int(k as i64);
        acc += &term.scale(&coeff).times_h_pow(k)?;
    }
    Ok(acc)
}

fn stage_fields<'a>(
    scheme: &'a SplitScheme,
    generators: &'a BTreeMap<Generator, VectorField>,
) -> Result<Vec<(&'a VectorField, &'a Rational)>> {
    scheme
        .stages
        .iter()
        .map(|s| {
            generators
                .get(&s.generator)
                .map(|f| (f, &s.fraction))
                .ok_or_else(|| Error::MissingGenerator(s.generator.to_string()))
        })
        .collect()
}

/// The operator product `prod_stage exp(fraction h X_g)` applied to each
/// coordinate function, truncated past `h^order`.
///
/// Since `exp(tX) f = f o phi_t`, the result is the coordinate expression
/// of the one-step map as a polynomial in `h`.
pub fn composed_map(
    scheme: &SplitScheme,
    generators: &BTreeMap<Generator, VectorField>,
    order: u32,
) -> Result<[Poly; 3]> {
    let stages = stage_fields(scheme, generators)?;
    let mut out: [Poly; 3] = Default::default();
    for (slot, v) in out.iter_mut().zip(Var::PHASE) {
        let mut f = Poly::var(v);
        for (field, frac) in stages.iter().rev() {
            f = exp_series(field, frac, &f, order)?;
        }
        *slot = f;
    }
    Ok(out)
}

/// Extracts `v0, v1, v2` from the composition by matching
/// `exp(h Y) x_i` with `Y = v0 + h v1 + h^2 v2` order by order.
pub fn modified_field(
    scheme: &SplitScheme,
    generators: &BTreeMap<Generator, VectorField>,
) -> Result<ModifiedField> {
    let map = composed_map(scheme, generators, SERIES_ORDER)?;
    for (p, v) in map.iter().zip(Var::PHASE) {
        debug_assert_eq!(p.h_coefficient(0), Poly::var(v));
    }
    let coeff = |k: u32| map.clone().map(|p| p.h_coefficient(k));
    let half = rational(1, 2);
    let sixth = rational(1, 6);

    let v0 = VectorField::new(coeff(1));
    let c2 = coeff(2);
    let mut v1 = VectorField::zero();
    for i in 0..3 {
        v1.components[i] = &c2[i] - &v0.try_apply(&v0.components[i])?.scale(&half);
    }
    let c3 = coeff(3);
    let mut v2 = VectorField::zero();
    for i in 0..3 {
        let v0i = &v0.components[i];
        let sym = &v0.try_apply(&v1.components[i])? + &v1.try_apply(v0i)?;
        let cube = v0.try_apply(&v0.try_apply(v0i)?)?;
        v2.components[i] = &(&c3[i] - &sym.scale(&half)) - &cube.scale(&sixth);
    }
    if scheme.is_palindromic() && !v1.is_zero() {
        return Err(Error::NonPalindromicScheme(scheme.label.clone()));
    }
    Ok(ModifiedField { v0, v1, v2 })
}

/// `coeff * [X_outer, [X_left, X_right]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedCommutator {
    pub coeff: Rational,
    pub outer: Generator,
    pub left: Generator,
    pub right: Generator,
}

impl NestedCommutator {
    pub fn field(&self, generators: &BTreeMap<Generator, VectorField>) -> Result<VectorField> {
        let get = |g: Generator| {
            generators
                .get(&g)
                .ok_or_else(|| Error::MissingGenerator(g.to_string()))
        };
        let inner = get(self.left)?.commutator(get(self.right)?);
        Ok(get(self.outer)?.commutator(&inner).scale(&self.coeff))
    }
}

impl fmt::Display for NestedCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{},[{},{}]]",
            self.coeff, self.outer, self.left, self.right
        )
    }
}

type Combination = BTreeMap<Generator, Rational>;

fn accumulate_triples(
    out: &mut BTreeMap<(Generator, Generator, Generator), Rational>,
    scale: &Rational,
    a: &Combination,
    b: &Combination,
    c: &Combination,
) {
    for ((ga, ca), (gb, cb), (gc, cc)) in a.iter().cartesian_product(b).cartesian_product(c).map(|((x, y), z)| (x, y, z)) {
        if gb == gc {
            continue;
        }
        let (l, r, sign) = if gb < gc { (*gb, *gc, int(1)) } else { (*gc, *gb, int(-1)) };
        *out.entry((*ga, l, r)).or_insert_with(Rational::zero) += scale * ca * cb * cc * sign;
    }
}

/// The `h^2` coefficient of the effective generator of a palindromic scheme
/// as a combination of nested commutators, from nesting the symmetric BCH
/// formula `log(e^{X/2} e^Y e^{X/2}) = X + Y - [X,[X,Y]]/24 + [Y,[Y,X]]/12`
/// from the middle stage outward. Inner pairs are ordered so the left
/// generator precedes the right one; zero coefficients are dropped.
pub fn commutator_expansion(scheme: &SplitScheme) -> Result<Vec<NestedCommutator>> {
    if !scheme.is_palindromic() {
        return Err(Error::NonPalindromicScheme(scheme.label.clone()));
    }
    let n = scheme.stages.len();
    let mut y0 = Combination::new();
    let mut triples = BTreeMap::new();
    let mid = n / 2;
    if n % 2 == 1 {
        let s = &scheme.stages[mid];
        y0.insert(s.generator, s.fraction.clone());
    }
    for i in (0..mid).rev() {
        let s = &scheme.stages[i];
        let mut x0 = Combination::new();
        x0.insert(s.generator, &s.fraction * int(2));
        accumulate_triples(&mut triples, &rational(-1, 24), &x0, &x0, &y0);
        accumulate_triples(&mut triples, &rational(1, 12), &y0, &y0, &x0);
        *y0.entry(s.generator).or_insert_with(Rational::zero) += &s.fraction * int(2);
    }
    Ok(triples
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((outer, left, right), coeff)| NestedCommutator {
            coeff,
            outer,
            left,
            right,
        })
        .collect())
}

/// `-(1/24) ({{V,T},T} - 2{{T,V},V})`, the `h^2` shadow correction of
/// position Verlet.
pub fn verlet_shadow_correction(t: &Poly, v: &Poly) -> Poly {
    let vtt = poisson(&poisson(v, t), t);
    let tvv = poisson(&poisson(t, v), v);
    (&vtt - &tvv.scale(&int(2))).scale(&rational(-1, 24))
}

/// Which term of `[X_{C,D}, X_{E,F}] f = {{f,E,F},C,D} - {{f,C,D},E,F}` the
/// fundamental identity is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentitySlot {
    First,
    Second,
}

/// The three binary choices made when rewriting
/// `[X_{A,B}, [X_{C,D}, X_{E,F}]]`: one for the inner commutator, then one
/// for each of the two commutators it produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RewriteChoice {
    pub inner: IdentitySlot,
    pub left: IdentitySlot,
    pub right: IdentitySlot,
}

impl RewriteChoice {
    pub fn all() -> [RewriteChoice; 8] {
        std::array::from_fn(|i| {
            let slot = |bit: usize| {
                if i >> bit & 1 == 0 {
                    IdentitySlot::First
                } else {
                    IdentitySlot::Second
                }
            };
            RewriteChoice {
                inner: slot(2),
                left: slot(1),
                right: slot(0),
            }
        })
    }
}

impl fmt::Display for RewriteChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |s: IdentitySlot| match s {
            IdentitySlot::First => '1',
            IdentitySlot::Second => '2',
        };
        write!(f, "{}{}{}", d(self.inner), d(self.left), d(self.right))
    }
}

/// `[X_{C,D}, X_{E,F}]` as two Hamiltonian pairs.
fn commutator_pairs(cd: &HamPair, ef: &HamPair, slot: IdentitySlot) -> [HamPair; 2] {
    let (c, d) = cd;
    let (e, f) = ef;
    match slot {
        IdentitySlot::First => [(nambu(e, c, d), f.clone()), (e.clone(), nambu(f, c, d))],
        IdentitySlot::Second => [(-nambu(c, e, f), d.clone()), (-c, nambu(d, e, f))],
    }
}

/// Rewrites `[X_outer, [X_inner1, X_inner2]]` as a sum of four `X_{P,Q}`
/// terms following the given fundamental-identity choices. Every choice
/// gives the same field; the expressions differ.
pub fn rewrite_nested_commutator(
    outer: &HamPair,
    inner1: &HamPair,
    inner2: &HamPair,
    choice: RewriteChoice,
) -> Vec<HamPair> {
    let [first, second] = commutator_pairs(inner1, inner2, choice.inner);
    let mut out = Vec::with_capacity(4);
    out.extend(commutator_pairs(outer, &first, choice.left));
    out.extend(commutator_pairs(outer, &second, choice.right));
    out
}

pub fn pairs_field(pairs: &[HamPair]) -> VectorField {
    pairs.iter().map(|(p, q)| lv_pair(p, q)).sum()
}

/// Drops pairs whose field vanishes and merges pairs that share an entry up
/// to a rational factor, using bilinearity and antisymmetry of `X_{P,Q}`.
pub fn simplify_pairs(pairs: &[HamPair]) -> Vec<HamPair> {
    let nonzero = |v: &mut Vec<HamPair>| v.retain(|(p, q)| !lv_pair(p, q).is_zero());
    let mut out: Vec<HamPair> = pairs.to_vec();
    nonzero(&mut out);
    'merge: loop {
        for i in 0..out.len() {
            for j in (i + 1)..out.len() {
                let (pi, qi) = out[i].clone();
                let (pj, qj) = out[j].clone();
                let merged = if let Some(c) = pj.ratio_to(&pi) {
                    Some((pi, &qi + &qj.scale(&c)))
                } else if let Some(c) = qj.ratio_to(&qi) {
                    Some((&pi + &pj.scale(&c), qi))
                } else if let Some(c) = pj.ratio_to(&qi) {
                    Some((&pi - &qj.scale(&c), qi))
                } else {
                    qj.ratio_to(&pi).map(|c| (pi, &qi - &pj.scale(&c)))
                };
                if let Some(m) = merged {
                    out.remove(j);
                    out[i] = m;
                    nonzero(&mut out);
                    continue 'merge;
                }
            }
        }
        break;
    }
    out
}

/// `X_{P1,Q1}` and `X_{P2,Q2}` are the same expression up to the sign
/// symmetries `X_{P,Q} = X_{-P,-Q} = X_{Q,-P} = X_{-Q,P}`.
pub fn pairs_equivalent(a: &HamPair, b: &HamPair) -> bool {
    let (p, q) = a;
    [
        (p.clone(), q.clone()),
        (-p, -q),
        (q.clone(), -p),
        (-q, p.clone()),
    ]
    .iter()
    .any(|x| x == b)
}

/// Order-free equivalence of two simplified pair lists.
pub fn pair_lists_equivalent(a: &[HamPair], b: &[HamPair]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&j| !used[j] && pairs_equivalent(x, &b[j])) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

/// A distinct simplified expression of a nested commutator and the rewrite
/// choices that produce it.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub pairs: Vec<HamPair>,
    pub choices: Vec<RewriteChoice>,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (p, q)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "X{{{p}, {q}}}")?;
        }
        Ok(())
    }
}

/// Groups the eight rewrite choices by the simplified expression they give,
/// in order of first appearance.
pub fn representations(outer: &HamPair, inner1: &HamPair, inner2: &HamPair) -> Vec<Representation> {
    let mut out: Vec<Representation> = Vec::new();
    for choice in RewriteChoice::all() {
        let pairs = simplify_pairs(&rewrite_nested_commutator(outer, inner1, inner2, choice));
        match out.iter_mut().find(|r| pair_lists_equivalent(&r.pairs, &pairs)) {
            Some(r) => r.choices.push(choice),
            None => out.push(Representation {
                pairs,
                choices: vec![choice],
            }),
        }
    }
    out
}

/// Coordinates of `(dH, dG)` pairs over all phase monomials of bounded degree.
struct PairSpace {
    monomials: Vec<Monomial>,
}

impl PairSpace {
    fn new(max_degree: u32) -> Self {
        PairSpace {
            monomials: Monomial::phase_monomials(max_degree),
        }
    }

    fn dim(&self) -> usize {
        2 * self.monomials.len()
    }

    fn unknown(&self, j: usize) -> HamPair {
        let n = self.monomials.len();
        let m = Poly::term(Rational::one(), self.monomials[j % n]);
        if j < n {
            (m, Poly::zero())
        } else {
            (Poly::zero(), m)
        }
    }

    fn to_vec(&self, pair: &HamPair) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (offset, p) in [(0, &pair.0), (self.monomials.len(), &pair.1)] {
            for (m, c) in p.terms() {
                let k = self.monomials.binary_search(m).ok()?;
                out[offset + k] = c.clone();
            }
        }
        Some(out)
    }

    fn pair_at(&self, x: &[Rational]) -> HamPair {
        let n = self.monomials.len();
        let poly = |xs: &[Rational]| {
            Poly::from_terms(self.monomials.iter().copied().zip(xs.iter().cloned()))
        };
        (poly(&x[..n]), poly(&x[n..]))
    }
}

/// Flattens fields into coefficient vectors over a shared row index.
fn field_rows(fields: &[&VectorField]) -> (BTreeMap<(usize, Monomial), usize>, Vec<Vec<Rational>>) {
    let mut rows = BTreeMap::new();
    for f in fields {
        for (i, c) in f.components.iter().enumerate() {
            for (m, _) in c.terms() {
                let next = rows.len();
                rows.entry((i, *m)).or_insert(next);
            }
        }
    }
    let vecs = fields
        .iter()
        .map(|f| {
            let mut v = vec![Rational::zero(); rows.len()];
            for (i, c) in f.components.iter().enumerate() {
                for (m, x) in c.terms() {
                    v[rows[&(i, *m)]] = x.clone();
                }
            }
            v
        })
        .collect();
    (rows, vecs)
}

/// Affine family of shadow corrections `(dH, dG)` with
/// `X_{dH,G} + X_{H,dG} = v2`. Corrections are the `h^2` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowFamily {
    pub particular: HamPair,
    pub homogeneous_basis: Vec<HamPair>,
    pub alpha: Option<f64>,
    pub max_degree: u32,
}

impl ShadowFamily {
    pub fn dimension(&self) -> usize {
        self.homogeneous_basis.len()
    }

    /// `particular + sum coeffs[i] * basis[i]`.
    pub fn member(&self, coeffs: &[Rational]) -> HamPair {
        let mut dh = self.particular.0.clone();
        let mut dg = self.particular.1.clone();
        for (c, (bh, bg)) in coeffs.iter().zip(&self.homogeneous_basis) {
            dh += &bh.scale(c);
            dg += &bg.scale(c);
        }
        (dh, dg)
    }

    /// Coordinates of `pair - particular` in the homogeneous basis, or
    /// `None` when the pair is not a member.
    pub fn coordinates(&self, pair: &HamPair) -> Option<Vec<Rational>> {
        let space = PairSpace::new(self.max_degree);
        let target = space.to_vec(&(&pair.0 - &self.particular.0, &pair.1 - &self.particular.1))?;
        let columns: Vec<_> = self
            .homogeneous_basis
            .iter()
            .map(|b| space.to_vec(b).expect("basis lies in the unknown space"))
            .collect();
        let a = Matrix::from_columns(space.dim(), &columns);
        linalg::solve(&a, &target).map(|s| s.particular)
    }

    pub fn contains(&self, pair: &HamPair) -> bool {
        self.coordinates(pair).is_some()
    }
}

/// Solves `X_{dH,G} + X_{H,dG} = v2` over all `dH, dG` with phase degree at
/// most `max_degree`.
///
/// The particular solution has the fewest nonzero coefficients, ties broken
/// by the smallest support in unknown order (`dH` monomials ascending, then
/// `dG` monomials ascending). If that search exceeds its budget the
/// echelon-form solution is used instead.
pub fn shadow_solve(v2: &VectorField, ham_h: &Poly, ham_g: &Poly, max_degree: u32) -> Result<ShadowFamily> {
    if max_degree < 2 {
        return Err(Error::InvalidArgument(format!(
            "shadow_solve needs max_degree >= 2, got {max_degree}"
        )));
    }
    if v2.components.iter().any(|c| c.depends_on(Var::H)) {
        return Err(Error::InvalidArgument("v2 must be h-free".into()));
    }
    let space = PairSpace::new(max_degree);
    let column_fields: Vec<VectorField> = (0..space.dim())
        .map(|j| {
            let (dh, dg) = space.unknown(j);
            &lv_pair(&dh, ham_g) + &lv_pair(ham_h, &dg)
        })
        .collect();
    let mut all: Vec<&VectorField> = column_fields.iter().collect();
    all.push(v2);
    let (rows, mut vecs) = field_rows(&all);
    let rhs = vecs.pop().expect("v2 row vector");
    let a = Matrix::from_columns(rows.len(), &vecs);

    let solution = linalg::solve(&a, &rhs).ok_or(Error::InconsistentSystem { max_degree })?;
    let particular = linalg::sparsest_solution(&a, &rhs, SPARSE_SEARCH_BUDGET)
        .unwrap_or_else(|| solution.particular.clone());
    Ok(ShadowFamily {
        particular: space.pair_at(&particular),
        homogeneous_basis: solution.null_basis.iter().map(|v| space.pair_at(v)).collect(),
        alpha: None,
        max_degree,
    })
}

/// Where a rewritten pair `X_{P,Q}` is absorbed when assembling
/// `X_{H, dG} + X_{dH, G}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Absorb {
    /// One entry is a multiple of a piece of `H`; the pair becomes
    /// `X_{H, c Q}` and contributes to `dG`.
    IntoDeltaG,
    /// One entry is a multiple of a piece of `G`; the pair becomes
    /// `X_{c P, G}` and contributes to `dH`.
    IntoDeltaH,
    /// The pair is left out and must be covered by the completion
    /// defects of other pairs.
    Deferred,
}

/// Completion options of a single pair: contribution `(dH, dG)` and how it
/// was absorbed.
fn completions(pair: &HamPair, hams: &Hamiltonians) -> Vec<(Absorb, HamPair)> {
    let (p, q) = pair;
    let mut out = Vec::new();
    for piece in hams.h_pieces() {
        if let Some(c) = p.ratio_to(piece) {
            out.push((Absorb::IntoDeltaG, (Poly::zero(), q.scale(&c))));
        }
    }
    for piece in hams.h_pieces() {
        if let Some(c) = q.ratio_to(piece) {
            out.push((Absorb::IntoDeltaG, (Poly::zero(), -p.scale(&c))));
        }
    }
    for piece in hams.g_pieces() {
        if let Some(c) = q.ratio_to(piece) {
            out.push((Absorb::IntoDeltaH, (p.scale(&c), Poly::zero())));
        }
    }
    for piece in hams.g_pieces() {
        if let Some(c) = p.ratio_to(piece) {
            out.push((Absorb::IntoDeltaH, (-q.scale(&c), Poly::zero())));
        }
    }
    out.dedup();
    out.push((Absorb::Deferred, (Poly::zero(), Poly::zero())));
    out
}

/// One way of turning a term's representation into a shadow contribution.
#[derive(Clone, Debug)]
struct TermOption {
    term: usize,
    representation: usize,
    absorbs: Vec<Absorb>,
    contribution: HamPair,
    defect: VectorField,
}

/// Weight given to one representation of one commutator term.
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteWeight {
    pub term: NestedCommutator,
    pub representation: Representation,
    pub absorbs: Vec<Absorb>,
    pub weight: Rational,
}

/// A shadow pair assembled from the rewritten BCH expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct BchShadowPair {
    pub delta_h: Poly,
    pub delta_g: Poly,
    pub prefer: Absorb,
    pub weights: Vec<RewriteWeight>,
}

/// Assembles a BCH shadow pair for a Nambu scheme.
///
/// Each nonvanishing nested commutator in [`commutator_expansion`] is
/// replaced by an affine combination of its fundamental-identity
/// representations, and each pair of a representation is absorbed into
/// `X_{H, dG}` or `X_{dH, G}` by completing a piece of `H` or `G` to the
/// whole Hamiltonian. The completions leave defect fields that must cancel
/// in total. Weights are chosen to make the defects cancel while using as
/// few absorptions against `prefer` as possible; ties go to the sparsest,
/// earliest options.
pub fn bch_shadow_pair(scheme: &SplitScheme, hams: &Hamiltonians, prefer: Absorb) -> Result<BchShadowPair> {
    if !scheme.is_nambu() {
        return Err(Error::InvalidArgument(format!(
            "{scheme} is not a composition of X1, X2, X3"
        )));
    }
    let gens = hams.generators();
    let pair_of = |g: Generator| hams.generator_pair(g).expect("Nambu generator");
    let terms: Vec<NestedCommutator> = commutator_expansion(scheme)?
        .into_iter()
        .filter(|t| t.field(&gens).map(|f| !f.is_zero()).unwrap_or(true))
        .collect();

    let mut reps_per_term = Vec::new();
    let mut options: Vec<TermOption> = Vec::new();
    for (ti, term) in terms.iter().enumerate() {
        let reps = representations(&pair_of(term.outer), &pair_of(term.left), &pair_of(term.right));
        for (ri, rep) in reps.iter().enumerate() {
            let per_pair: Vec<Vec<(Absorb, HamPair)>> =
                rep.pairs.iter().map(|pq| completions(pq, hams)).collect();
            for combo in per_pair.iter().multi_cartesian_product() {
                let mut dh = Poly::zero();
                let mut dg = Poly::zero();
                for (_, (a, b)) in &combo {
                    dh += a;
                    dg += b;
                }
                let completed = &lv_pair(&dh, &hams.g) + &lv_pair(&hams.h, &dg);
                let defect = (&completed - &pairs_field(&rep.pairs)).scale(&term.coeff);
                options.push(TermOption {
                    term: ti,
                    representation: ri,
                    absorbs: combo.iter().map(|(a, _)| *a).collect(),
                    contribution: (dh.scale(&term.coeff), dg.scale(&term.coeff)),
                    defect,
                });
            }
        }
        reps_per_term.push(reps);
    }
    for (ti, term) in terms.iter().enumerate() {
        if !options.iter().any(|o| o.term == ti) {
            return Err(Error::Rewrite(format!("no representation of {term} can be absorbed")));
        }
    }

    // rows: one "weights sum to one" row per term, then the defect rows
    let defects: Vec<&VectorField> = options.iter().map(|o| &o.defect).collect();
    let (defect_rows, defect_vecs) = field_rows(&defects);
    let nrows = terms.len() + defect_rows.len();
    let columns: Vec<Vec<Rational>> = options
        .iter()
        .zip(&defect_vecs)
        .map(|(o, d)| {
            let mut col = vec![Rational::zero(); terms.len()];
            col[o.term] = Rational::one();
            col.extend(d.iter().cloned());
            col
        })
        .collect();
    let mut rhs = vec![Rational::one(); terms.len()];
    rhs.extend(std::iter::repeat_n(Rational::zero(), defect_rows.len()));

    // identical columns are interchangeable; keep the earliest
    let mut distinct: Vec<usize> = Vec::new();
    for j in 0..columns.len() {
        if !distinct.iter().any(|&k| columns[k] == columns[j]) {
            distinct.push(j);
        }
    }
    let (preferred, other): (Vec<usize>, Vec<usize>) =
        distinct.iter().copied().partition(|&j| {
            options[j]
                .absorbs
                .iter()
                .all(|a| *a == prefer || *a == Absorb::Deferred)
        });
    let mut weights = None;
    'search: for k in 0..=other.len() {
        for extra in other.iter().copied().combinations(k) {
            let mut cols: Vec<usize> = preferred.iter().copied().chain(extra.iter().copied()).collect();
            cols.sort_unstable();
            let sub: Vec<Vec<Rational>> = cols.iter().map(|&j| columns[j].clone()).collect();
            let a = Matrix::from_columns(nrows, &sub);
            let Some(x) = linalg::sparsest_solution(&a, &rhs, SPARSE_SEARCH_BUDGET) else {
                continue;
            };
            let uses_all_extra = extra
                .iter()
                .all(|j| !x[cols.iter().position(|c| c == j).unwrap()].is_zero());
            if !uses_all_extra {
                continue;
            }
            let mut full = vec![Rational::zero(); options.len()];
            for (k, &j) in cols.iter().enumerate() {
                full[j] = x[k].clone();
            }
            weights = Some(full);
            break 'search;
        }
    }
    let weights = weights.ok_or_else(|| {
        Error::Rewrite(format!("defects of {scheme} cannot be cancelled by any rewriting"))
    })?;

    let mut delta_h = Poly::zero();
    let mut delta_g = Poly::zero();
    let mut used = Vec::new();
    for (o, w) in options.iter().zip(&weights) {
        if w.is_zero() {
            continue;
        }
        delta_h += &o.contribution.0.scale(w);
        delta_g += &o.contribution.1.scale(w);
        used.push(RewriteWeight {
            term: terms[o.term].clone(),
            representation: reps_per_term[o.term][o.representation].clone(),
            absorbs: o.absorbs.clone(),
            weight: w.clone(),
        });
    }
    let target: VectorField = terms
        .iter()
        .map(|t| t.field(&gens))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    if &lv_pair(&delta_h, &hams.g) + &lv_pair(&hams.h, &delta_g) != target {
        return Err(Error::Rewrite(format!("assembled pair for {scheme} does not reproduce the BCH field")));
    }
    Ok(BchShadowPair {
        delta_h,
        delta_g,
        prefer,
        weights: used,
    })
}

/// Replaces `x3` using `constraint = const`, where `constraint` is linear in
/// `x3` with a constant coefficient, and then drops monomials free of the
/// phase variables. The integration constant is set to zero.
pub fn eliminate_x3(p: &Poly, constraint: &Poly) -> Result<Poly> {
    let x3 = Monomial::var(Var::X3);
    let k = constraint.coeff(&x3);
    let rest = constraint - &Poly::term(k.clone(), x3);
    if k.is_zero() || rest.depends_on(Var::X3) {
        return Err(Error::InvalidArgument(format!(
            "{constraint} is not linear in x3 with constant coefficient"
        )));
    }
    let replacement = rest.scale(&(-Rational::one() / k));
    Ok(p.substitute(Var::X3, &replacement)?.drop_phase_constants())
}

/// `h^2` coefficients of `F(omega h)^alpha H_c` and `F(omega h)^(1-alpha) G_c`,
/// using `F(x) = 1 + x^2/6 + O(x^4)`.
pub fn exact_shadow_corrections(
    label: &str,
    alpha: &Rational,
    params: &OscillatorParams,
    registry: &ConservedRegistry,
) -> Result<HamPair> {
    let hams = Hamiltonians::new(params);
    let pair = registry.conserved_pair(label, params)?;
    let f2 = &params.omega_sq() * rational(1, 6);
    let dh = &pair.h_c.h_coefficient(2) + &hams.h.scale(&(alpha * &f2));
    let dg = &pair.g_c.h_coefficient(2) + &hams.g.scale(&((Rational::one() - alpha) * &f2));
    Ok((dh, dg))
}

/// Outcome of comparing the alpha-interpolated BCH shadow pair with the
/// alpha-family of exact shadows.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub scheme_label: String,
    pub alpha: f64,
    pub params: OscillatorParams,
    /// BCH pairs at `alpha = 1` (corrections pushed into `dH`) and
    /// `alpha = 0` (corrections pushed into `dG`).
    pub bch_endpoints: (BchShadowPair, BchShadowPair),
    pub bch_pair: HamPair,
    pub exact_pair: HamPair,
    pub bch_normalized: HamPair,
    pub exact_normalized: HamPair,
    pub family: ShadowFamily,
    pub exact_in_family: bool,
    pub bch_in_family: bool,
    /// Where each rewriting endpoint sits on the exact alpha-family after
    /// normalization, or `None` when it is off the family's alpha line.
    pub endpoint_alphas: (Option<Rational>, Option<Rational>),
    /// `(slot, monomial, bch coefficient, exact coefficient)` for every
    /// monomial present on either side.
    pub rows: Vec<(&'static str, Monomial, Rational, Rational)>,
    pub consistent: bool,
}

/// Builds the BCH shadow pair `alpha P1 + (1 - alpha) P0` from the two
/// rewriting endpoints, the exact shadow corrections for the same `alpha`,
/// normalizes both by eliminating `x3` (through `G = const` in `dH`, through
/// `H = const` in `dG`) and compares them coefficient by coefficient.
pub fn bch_consistency_report(
    scheme: &SplitScheme,
    alpha: f64,
    params: &OscillatorParams,
) -> Result<ConsistencyReport> {
    if !crate::scheme::NAMBU_SCHEMES.contains(&scheme.label.as_str()) {
        return Err(Error::UnknownScheme(scheme.label.clone()));
    }
    let a = Rational::from_float(alpha)
        .ok_or_else(|| Error::DomainError(format!("alpha = {alpha} is not finite")))?;
    let hams = Hamiltonians::new(params);
    let one = bch_shadow_pair(scheme, &hams, Absorb::IntoDeltaH)?;
    let zero = bch_shadow_pair(scheme, &hams, Absorb::IntoDeltaG)?;
    let b = Rational::one() - &a;
    let bch_pair = (
        &one.delta_h.scale(&a) + &zero.delta_h.scale(&b),
        &one.delta_g.scale(&a) + &zero.delta_g.scale(&b),
    );
    let exact_pair = exact_shadow_corrections(&scheme.label, &a, params, &ConservedRegistry::standard())?;
    let normalize = |(dh, dg): &HamPair| -> Result<HamPair> {
        Ok((eliminate_x3(dh, &hams.g)?, eliminate_x3(dg, &hams.h)?))
    };
    let bch_normalized = normalize(&bch_pair)?;
    let exact_normalized = normalize(&exact_pair)?;

    let registry = ConservedRegistry::standard();
    let exact_at = |x: Rational| -> Result<HamPair> {
        normalize(&exact_shadow_corrections(&scheme.label, &x, params, &registry)?)
    };
    let base = exact_at(Rational::zero())?;
    let top = exact_at(Rational::one())?;
    let dir = (&top.0 - &base.0, &top.1 - &base.1);
    let locate = |p: &BchShadowPair| -> Result<Option<Rational>> {
        let n = normalize(&(p.delta_h.clone(), p.delta_g.clone()))?;
        Ok(alpha_along(&(&n.0 - &base.0, &n.1 - &base.1), &dir))
    };
    let endpoint_alphas = (locate(&one)?, locate(&zero)?);

    let mf = modified_field(scheme, &hams.generators())?;
    let mut family = shadow_solve(&mf.v2, &hams.h, &hams.g, 2)?;
    family.alpha = Some(alpha);
    let exact_in_family = family.contains(&exact_normalized);
    let bch_in_family = family.contains(&bch_pair);

    let mut rows = Vec::new();
    for (slot, x, y) in [
        ("dH", &bch_normalized.0, &exact_normalized.0),
        ("dG", &bch_normalized.1, &exact_normalized.1),
    ] {
        let monos: std::collections::BTreeSet<Monomial> =
            x.terms().chain(y.terms()).map(|(m, _)| *m).collect();
        for m in monos.into_iter().rev() {
            rows.push((slot, m, x.coeff(&m), y.coeff(&m)));
        }
    }
    let consistent = bch_normalized == exact_normalized;
    Ok(ConsistencyReport {
        scheme_label: scheme.label.clone(),
        alpha,
        params: params.clone(),
        bch_endpoints: (one, zero),
        bch_pair,
        exact_pair,
        bch_normalized,
        exact_normalized,
        family,
        exact_in_family,
        bch_in_family,
        endpoint_alphas,
        rows,
        consistent,
    })
}

/// `Some(c)` when `diff = c * dir` slot by slot.
fn alpha_along(diff: &HamPair, dir: &HamPair) -> Option<Rational> {
    let mut found: Option<Rational> = None;
    for (x, d) in [(&diff.0, &dir.0), (&diff.1, &dir.1)] {
        let c = match (x.is_zero(), d.is_zero()) {
            (true, true) => continue,
            (false, true) => return None,
            (true, false) => Rational::zero(),
            (false, false) => x.ratio_to(d)?,
        };
        if found.as_ref().is_some_and(|f| *f != c) {
            return None;
        }
        found = Some(c);
    }
    Some(found.unwrap_or_else(Rational::zero))
}

fn shadow_line(name: &str, base: &str, corr: &Poly) -> String {
    if corr.is_zero() {
        format!("{name} = {base} + O(h^3)")
    } else {
        format!("{name} = {base} + h^2*({corr}) + O(h^3)")
    }
}

impl ConsistencyReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let push = |s: &mut String, line: String| {
            s.push_str(&line);
            s.push('\n');
        };
        push(&mut s, format!(
            "shadow consistency for Phi^{} (m = {}, omega = {}, alpha = {})",
            self.scheme_label, self.params.m, self.params.omega, self.alpha
        ));
        push(&mut s, "BCH shadow pair (alpha-interpolated rewriting):".into());
        push(&mut s, format!("  {}", shadow_line("H_S", "H", &self.bch_pair.0)));
        push(&mut s, format!("  {}", shadow_line("G_S", "G", &self.bch_pair.1)));
        push(&mut s, "exact shadow pair F^alpha H_c, F^(1-alpha) G_c to O(h^2):".into());
        push(&mut s, format!("  {}", shadow_line("H_S^e", "H", &self.exact_pair.0)));
        push(&mut s, format!("  {}", shadow_line("G_S^e", "G", &self.exact_pair.1)));
        push(&mut s, "after eliminating x3 and dropping constants:".into());
        push(&mut s, format!("  {:<4} {:<10} {:>16} {:>16}  {}", "slot", "monomial", "BCH", "exact", "match"));
        for (slot, m, x, y) in &self.rows {
            push(&mut s, format!(
                "  {:<4} {:<10} {:>16} {:>16}  {}",
                slot,
                m.to_string(),
                x.to_string(),
                y.to_string(),
                if x == y { "yes" } else { "NO" }
            ));
        }
        let show = |a: &Option<Rational>| a.as_ref().map_or("off the alpha line".to_string(), |x| x.to_string());
        push(&mut s, format!(
            "rewriting endpoints sit at alpha = {} (dH-leaning) and alpha = {} (dG-leaning)",
            show(&self.endpoint_alphas.0),
            show(&self.endpoint_alphas.1)
        ));
        push(&mut s, format!("exact pair in BCH shadow family: {}", self.exact_in_family));
        push(&mut s, format!("consistent at order h^2: {}", self.consistent));
        if self.scheme_label != "12321" {
            push(&mut s, "note: exact shadows for this scheme extrapolate the 12321 construction".into());
        }
        s
    }

    pub fn render_kv(&self) -> String {
        let mut out = vec![
            format!("scheme={}", self.scheme_label),
            format!("alpha={}", self.alpha),
            format!("m={}", self.params.m),
            format!("omega={}", self.params.omega),
            format!("bch.dH={}", self.bch_pair.0),
            format!("bch.dG={}", self.bch_pair.1),
            format!("exact.dH={}", self.exact_pair.0),
            format!("exact.dG={}", self.exact_pair.1),
            format!("normalized.bch.dH={}", self.bch_normalized.0),
            format!("normalized.bch.dG={}", self.bch_normalized.1),
            format!("normalized.exact.dH={}", self.exact_normalized.0),
            format!("normalized.exact.dG={}", self.exact_normalized.1),
            format!("family.dimension={}", self.family.dimension()),
            format!("exact_in_family={}", self.exact_in_family),
            format!(
                "endpoint_alphas={},{}",
                self.endpoint_alphas.0.as_ref().map_or("none".into(), |x| x.to_string()),
                self.endpoint_alphas.1.as_ref().map_or("none".into(), |x| x.to_string())
            ),
            format!("consistent={}", self.consistent),
        ];
        out.push(String::new());
        out.join("\n")
    }
}

/// Largest `|coefficient|` of a field, as a float. Handy for reporting.
pub fn max_abs_coefficient(v: &VectorField) -> f64 {
    v.components
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| to_f64(c).abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::lv_single;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn unit() -> Hamiltonians {
        Hamiltonians::new(&OscillatorParams::unit())
    }

    #[test]
    fn lone_exponential_has_no_corrections() {
        let hs = unit();
        let mf = modified_field(&SplitScheme::single(Generator::X1), &hs.generators()).unwrap();
        assert_eq!(mf.v0, hs.generator_field(Generator::X1));
        assert!(mf.v1.is_zero());
        assert!(mf.v2.is_zero());
    }

    #[test]
    fn verlet_second_order_term() {
        let hs = unit();
        let mf = modified_field(&SplitScheme::builtin("TVT").unwrap(), &hs.generators()).unwrap();
        assert_eq!(mf.v0, hs.canonical_field());
        assert!(mf.v1.is_zero());
        assert_eq!(mf.v2, lv_single(&verlet_shadow_correction(&hs.t, &hs.v)));
        assert_eq!(
            verlet_shadow_correction(&hs.t, &hs.v),
            p("-1/24*x2^2 + 1/12*x1^2")
        );
    }

    #[test]
    fn missing_generator_is_reported() {
        let gens = BTreeMap::new();
        assert!(matches!(
            modified_field(&SplitScheme::builtin("12321").unwrap(), &gens),
            Err(Error::MissingGenerator(_))
        ));
    }

    #[test]
    fn non_palindromic_scheme_keeps_first_order_term() {
        let hs = unit();
        let lie = SplitScheme::new(
            "12",
            vec![
                Stage { generator: Generator::X1, fraction: Rational::one() },
                Stage { generator: Generator::X2, fraction: Rational::one() },
            ],
        )
        .unwrap();
        let mf = modified_field(&lie, &hs.generators()).unwrap();
        // log(e^A e^B) = A + B + [A,B]/2 + ...
        let x1 = hs.generator_field(Generator::X1);
        let x2 = hs.generator_field(Generator::X2);
        assert_eq!(mf.v1, x1.commutator(&x2).scale(&rational(1, 2)));
        assert!(commutator_expansion(&lie).is_err());
    }

    #[test]
    fn verlet_expansion_terms() {
        let terms = commutator_expansion(&SplitScheme::builtin("TVT").unwrap()).unwrap();
        let text: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(text, vec!["-1/24 [XT,[XT,XV]]", "-1/12 [XV,[XT,XV]]"]);
    }

    #[test]
    fn rewrite_choice_enumeration() {
        let all = RewriteChoice::all();
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 8);
        assert_eq!(all[0].to_string(), "111");
        assert_eq!(all[7].to_string(), "222");
    }

    #[test]
    fn first_choice_matches_the_four_term_expansion() {
        // all-first choice: X_{{{E,C,D},A,B},F} + X_{{E,C,D},{F,A,B}}
        //                 + X_{{E,A,B},{F,C,D}} + X_{E,{{F,C,D},A,B}}
        let hs = unit();
        let (a, b) = (p("x1*x2"), hs.c.clone());
        let (c, d) = (hs.a.clone(), p("x1^2 + x3"));
        let (e, f) = (hs.b.clone(), p("x2*x3"));
        let got = rewrite_nested_commutator(
            &(a.clone(), b.clone()),
            &(c.clone(), d.clone()),
            &(e.clone(), f.clone()),
            RewriteChoice::all()[0],
        );
        let ecd = nambu(&e, &c, &d);
        let fcd = nambu(&f, &c, &d);
        let want = vec![
            (nambu(&ecd, &a, &b), f.clone()),
            (ecd.clone(), nambu(&f, &a, &b)),
            (nambu(&e, &a, &b), fcd.clone()),
            (e.clone(), nambu(&fcd, &a, &b)),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn simplify_merges_shared_entries() {
        let a = p("x2^2");
        let pairs = vec![(a.clone(), p("x1^2")), (a.scale(&int(2)), p("x3"))];
        let s = simplify_pairs(&pairs);
        assert_eq!(s, vec![(a.clone(), p("x1^2 + 2*x3"))]);
        assert_eq!(pairs_field(&s), pairs_field(&pairs));
        assert!(simplify_pairs(&[(p("x1*x2"), p("-2*x1*x2"))]).is_empty());
    }

    #[test]
    fn pair_equivalence_moves_factors() {
        assert!(pairs_equivalent(&(p("-x3"), p("x1^2")), &(p("x3"), p("-x1^2"))));
        assert!(pairs_equivalent(&(p("x3"), p("x1^2")), &(p("x1^2"), p("-x3"))));
        assert!(!pairs_equivalent(&(p("2*x3"), p("x1^2")), &(p("x3"), p("2*x1^2"))));
        assert!(!pairs_equivalent(&(p("x3"), p("x1^2")), &(p("x3"), p("x2^2"))));
    }

    #[test]
    fn eliminate_x3_uses_linear_constraint() {
        let hs = unit();
        assert_eq!(eliminate_x3(&p("1/12*x3"), &hs.g).unwrap(), p("1/12*x1^2"));
        assert_eq!(eliminate_x3(&p("1/6*x3 + 5"), &hs.h).unwrap(), p("-1/6*x2^2"));
        assert!(eliminate_x3(&p("x3"), &p("x3^2")).is_err());
    }

    #[test]
    fn shadow_solve_rejects_small_degree() {
        let hs = unit();
        assert!(shadow_solve(&VectorField::zero(), &hs.h, &hs.g, 1).is_err());
    }

    #[test]
    fn shadow_solve_reports_inconsistency() {
        let hs = unit();
        // a field that is not divergence free cannot be X_{dH,G} + X_{H,dG}
        let bad = VectorField::new([Poly::x1(), Poly::zero(), Poly::zero()]);
        assert!(matches!(
            shadow_solve(&bad, &hs.h, &hs.g, 2),
            Err(Error::InconsistentSystem { max_degree: 2 })
        ));
    }
}
