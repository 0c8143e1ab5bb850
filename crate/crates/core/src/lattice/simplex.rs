//! Exact rational simplex for `max c·y  s.t.  G y ≤ h`, `y` free.
//!
//! Dense two-phase tableau with Bland's rule, so it terminates on degenerate
//! problems. Sized for the handful of variables the feasibility engine feeds
//! it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<BigRational>, value: BigRational },
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    /// columns that may never enter the basis (artificials in phase two)
    barred: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for j in 0..self.rows[i].len() {
                if !self.rows[r][j].is_zero() {
                    let delta = &factor * &self.rows[r][j];
                    self.rows[i][j] -= delta;
                }
            }
            let delta = &factor * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` from the current basic feasible solution.
    /// Returns false when the objective is unbounded.
    fn optimize(&mut self, cost: &[BigRational]) -> bool {
        let width = cost.len();
        loop {
            let entering = (0..width).find(|&j| {
                if self.barred[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][c];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }

    fn value_of(&self, column: usize) -> BigRational {
        self.basis
            .iter()
            .position(|&b| b == column)
            .map_or_else(BigRational::zero, |i| self.rhs[i].clone())
    }
}

/// Solves `max objective·y` subject to `constraints[i]·y ≤ bounds[i]`.
pub(crate) fn maximize(
    objective: &[BigRational],
    constraints: &[Vec<BigRational>],
    bounds: &[BigRational],
) -> LpOutcome {
    let p = objective.len();
    let m = constraints.len();
    // columns: y⁺ (p), y⁻ (p), slacks (m), artificials (one per negative rhs)
    let needs_artificial: Vec<bool> = bounds.iter().map(|b| b.is_negative()).collect();
    let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
    let width = 2 * p + m + artificial_count;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_artificial = 2 * p + m;
    for i in 0..m {
        let sign = if needs_artificial[i] {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        let mut row = vec![BigRational::zero(); width];
        for j in 0..p {
            row[j] = &sign * &constraints[i][j];
            row[p + j] = -&row[j];
        }
        row[2 * p + i] = sign.clone();
        if needs_artificial[i] {
            row[next_artificial] = BigRational::one();
            basis.push(next_artificial);
            next_artificial += 1;
        } else {
            basis.push(2 * p + i);
        }
        rows.push(row);
        rhs.push(&sign * &bounds[i]);
    }
    let mut tableau = Tableau {
        rows,
        rhs,
        basis,
        barred: vec![false; width],
    };

    if artificial_count > 0 {
        let phase_one: Vec<BigRational> = (0..width)
            .map(|j| {
                if j >= 2 * p + m {
                    -BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        tableau.optimize(&phase_one);
        let infeasibility: BigRational = (2 * p + m..width).map(|j| tableau.value_of(j)).sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tableau.rows.len() {
            if tableau.basis[i] >= 2 * p + m {
                match (0..2 * p + m).find(|&j| !tableau.rows[i][j].is_zero()) {
                    Some(j) => tableau.pivot(i, j),
                    None => {
                        tableau.rows.remove(i);
                        tableau.rhs.remove(i);
                        tableau.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for j in 2 * p + m..width {
            tableau.barred[j] = true;
        }
    }

    let mut cost = vec![BigRational::zero(); width];
    for j in 0..p {
        cost[j] = objective[j].clone();
        cost[p + j] = -&objective[j];
    }
    if !tableau.optimize(&cost) {
        return LpOutcome::Unbounded;
    }
    let point: Vec<BigRational> = (0..p)
        .map(|j| tableau.value_of(j) - tableau.value_of(p + j))
        .collect();
    let value = point
        .iter()
        .zip(objective)
        .map(|(y, c)| y * c)
        .sum();
    LpOutcome::Optimal { point, value }
}

pub(crate) fn rational(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}
