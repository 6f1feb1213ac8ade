//! Exact linear algebra over the rationals: reduced row echelon form,
//! affine solution sets, and a sparsest-solution search.

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::poly::Rational;

/// Dense `rows x cols` rational matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    fn select_columns(&self, cols: &[usize]) -> Matrix {
        let columns: Vec<_> = cols.iter().map(|&j| self.column(j)).collect();
        Matrix::from_columns(self.rows, &columns)
    }

    /// Reduces in place and returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = Rational::one() / &self[(r, c)];
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let factor = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = &self[(i, j)] - &factor * &self[(r, j)];
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution set `{particular + sum c_i * null_basis[i]}` of `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub null_basis: Vec<Vec<Rational>>,
}

/// Solves `A x = b`; `None` when inconsistent. The particular solution sets
/// every free variable to zero.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<AffineSolution> {
    assert_eq!(a.rows, b.len());
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut particular = vec![Rational::zero(); a.cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[(r, a.cols)].clone();
    }
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let null_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); a.cols];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -aug[(r, f)].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution {
        particular,
        null_basis,
    })
}

/// Searches for a solution of `A x = b` with the fewest nonzero entries,
/// breaking ties by the lexicographically smallest support (column index
/// order). Gives up after `budget` subset solves and returns `None`.
pub fn sparsest_solution(a: &Matrix, b: &[Rational], budget: usize) -> Option<Vec<Rational>> {
    if b.iter().all(Zero::is_zero) {
        return Some(vec![Rational::zero(); a.cols]);
    }
    solve(a, b)?;
    let rank = a.rank();
    let mut spent = 0usize;
    for size in 1..=rank.min(a.cols) {
        for support in (0..a.cols).combinations(size) {
            spent += 1;
            if spent > budget {
                return None;
            }
            let sub = a.select_columns(&support);
            let Some(sol) = solve(&sub, b) else { continue };
            if !sol.null_basis.is_empty() || sol.particular.iter().any(Zero::is_zero) {
                continue;
            }
            let mut x = vec![Rational::zero(); a.cols];
            for (k, &j) in support.iter().enumerate() {
                x[j] = sol.particular[k].clone();
            }
            return Some(x);
        }
    }
    None
}

/// `A x`.
pub fn apply(a: &Matrix, x: &[Rational]) -> Vec<Rational> {
    (0..a.rows)
        .map(|i| (0..a.cols).map(|j| &a[(i, j)] * &x[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                out[(i, j)] = int(x);
            }
        }
        out
    }

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn solves_with_null_space() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let b = v(&[2, 3]);
        let sol = solve(&a, &b).unwrap();
        assert_eq!(apply(&a, &sol.particular), b);
        assert_eq!(sol.null_basis.len(), 1);
        assert_eq!(apply(&a, &sol.null_basis[0]), v(&[0, 0]));
    }

    #[test]
    fn detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &v(&[1, 3])).is_none());
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn sparsest_prefers_small_lex_support() {
        // columns 0 and 1 both reach b alone; column 0 wins.
        let a = m(&[&[2, 1, 1], &[0, 0, 1]]);
        let x = sparsest_solution(&a, &v(&[4, 0]), 1000).unwrap();
        assert_eq!(x, v(&[2, 0, 0]));
        let x = sparsest_solution(&a, &v(&[1, 1]), 1000).unwrap();
        assert_eq!(x, v(&[0, 0, 1]));
    }
}
