//! Exact dense linear solving over the rationals.
//!
//! Backend of the symbol-descent generator matching: the systems are
//! small (tens of unknowns), so plain fraction-exact Gauss-Jordan
//! elimination is entirely adequate.

use crate::error::LinAlgError;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// Exactly one solution.
    Unique(Vec<Rational>),
    /// Consistent but rank-deficient; carries the particular solution
    /// with all free variables set to zero.
    Underdetermined(Vec<Rational>),
    NoSolution,
}

impl LinearSolution {
    /// Any exact solution, if one exists.
    pub fn into_any(self) -> Option<Vec<Rational>> {
        match self {
            LinearSolution::Unique(x) | LinearSolution::Underdetermined(x) => Some(x),
            LinearSolution::NoSolution => None,
        }
    }
}

/// Solves `A x = b` exactly. `a` is row-major; all rows must have equal
/// length and `b` one entry per row.
pub fn solve_linear_system(
    a: &[Vec<Rational>],
    b: &[Rational],
) -> Result<LinearSolution, LinAlgError> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) || b.len() != rows {
        return Err(LinAlgError::DimensionMismatch {
            rows,
            cols,
            rhs: b.len(),
        });
    }

    // Augmented working copy.
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|r| !m[*r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in col..=cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let delta = &f * &m[row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }

    // Inconsistent row: all-zero coefficients with nonzero rhs.
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return Ok(LinearSolution::NoSolution);
        }
    }

    let mut x = vec![Rational::ZERO; cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    if pivot_cols.len() == cols {
        Ok(LinearSolution::Unique(x))
    } else {
        Ok(LinearSolution::Underdetermined(x))
    }
}
