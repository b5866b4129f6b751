//! Exact linear programming over an ordered field.
//!
//! A dense primal simplex with Bland's pivot rule, which guarantees
//! termination without any perturbation or tolerance. Programs are stated as
//! `maximize c·x subject to Ax ≤ b, x ≥ 0` with `b ≥ 0`, so the all-slack
//! basis is feasible and no phase-one is needed; every mechanism-design
//! program in this crate has this shape (the zero menu satisfies all of its
//! constraints).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An inequality `coeffs · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

/// `maximize objective · x subject to constraints, x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram<T> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution<T> {
    pub values: Vec<T>,
    pub objective: T,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize, objective: Vec<T>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram { num_vars, objective, constraints: Vec::new() }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, rhs });
    }

    /// True when `x` satisfies every constraint and the sign restrictions,
    /// exactly. Used to re-check solutions by substitution.
    pub fn is_feasible(&self, x: &[T]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c
                .coeffs
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (a, v)| acc + a.clone() * v.clone());
            lhs <= c.rhs
        })
    }

    /// Solves the program exactly. Errors if any right-hand side is negative
    /// (the all-slack start would be infeasible) or the program is unbounded.
    pub fn solve(&self) -> Result<LpSolution<T>> {
        if let Some(c) = self.constraints.iter().find(|c| c.rhs.is_negative()) {
            return Err(Error::Invalid(format!(
                "negative right-hand side {} (origin must be feasible)",
                c.rhs
            )));
        }

        let n = self.num_vars;
        let m = self.constraints.len();
        let width = n + m + 1;

        // Rows 0..m are constraints with slack columns; the last row carries
        // reduced costs (z_j − c_j) and, in the corner, the objective value.
        let mut tab: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        for (i, c) in self.constraints.iter().enumerate() {
            let mut row = vec![T::zero(); width];
            row[..n].clone_from_slice(&c.coeffs);
            row[n + i] = T::one();
            row[width - 1] = c.rhs.clone();
            tab.push(row);
        }
        let mut obj_row = vec![T::zero(); width];
        for (j, c) in self.objective.iter().enumerate() {
            obj_row[j] = T::zero() - c.clone();
        }
        tab.push(obj_row);

        let mut basis: Vec<usize> = (n..n + m).collect();

        // Bland: entering variable is the lowest-index improving column.
        while let Some(entering) = (0..n + m).find(|&j| tab[m][j].is_negative()) {
            // Leaving row: minimum ratio, ties to the smallest basic index.
            let mut leaving: Option<usize> = None;
            for i in 0..m {
                if !tab[i][entering].is_positive() {
                    continue;
                }
                let better = match leaving {
                    None => true,
                    Some(l) => {
                        // b_i / a_ie < b_l / a_le, compared without division.
                        let lhs = tab[i][width - 1].clone() * tab[l][entering].clone();
                        let rhs = tab[l][width - 1].clone() * tab[i][entering].clone();
                        lhs < rhs || (lhs == rhs && basis[i] < basis[l])
                    }
                };
                if better {
                    leaving = Some(i);
                }
            }
            let leaving = leaving.ok_or(Error::LpUnbounded)?;

            let pivot = tab[leaving][entering].clone();
            for x in tab[leaving].iter_mut() {
                *x = x.clone() / pivot.clone();
            }
            let pivot_row = tab[leaving].clone();
            for (i, row) in tab.iter_mut().enumerate() {
                if i == leaving || row[entering].is_zero() {
                    continue;
                }
                let factor = row[entering].clone();
                for (cell, p) in row.iter_mut().zip(&pivot_row) {
                    let delta = factor.clone() * p.clone();
                    *cell = cell.clone() - delta;
                }
            }
            basis[leaving] = entering;
        }

        let mut values = vec![T::zero(); n];
        for (i, &var) in basis.iter().enumerate() {
            if var < n {
                values[var] = tab[i][width - 1].clone();
            }
        }
        Ok(LpSolution { values, objective: tab[m][width - 1].clone() })
    }
}
