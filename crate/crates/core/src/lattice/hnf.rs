//! Integer solution lattices of `A x = b` via unimodular column reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `{x ∈ ℤⁿ : A x = b} = {base + Σ λ_i kernel[i] : λ ∈ ℤᵖ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SolutionLattice {
    pub base: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

/// Column-style Hermite reduction: finds a unimodular `U` with `A U` lower
/// echelon, solves the echelon system by forward substitution and maps back.
/// Returns `None` when `A x = b` has no integer solution.
pub(crate) fn solution_lattice(
    rows: &[Vec<BigInt>],
    rhs: &[BigInt],
    vars: usize,
) -> Option<SolutionLattice> {
    let mut h: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..vars)
        .map(|i| {
            (0..vars)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // column operations applied to both h (m×n) and u (n×n)
    let sub_col = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let delta = &row[src] * q;
            row[dst] -= delta;
        }
    };
    let swap_col = |m: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    };
    let neg_col = |m: &mut Vec<Vec<BigInt>>, c: usize| {
        for row in m.iter_mut() {
            row[c] = -&row[c];
        }
    };

    let mut pivot_of_row: Vec<Option<usize>> = vec![None; h.len()];
    let mut rank = 0;
    for i in 0..h.len() {
        if rank == vars {
            break;
        }
        loop {
            let smallest = (rank..vars)
                .filter(|&c| !h[i][c].is_zero())
                .min_by(|&a, &b| h[i][a].abs().cmp(&h[i][b].abs()));
            let Some(p) = smallest else { break };
            let mut done = true;
            for c in rank..vars {
                if c == p || h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[i][p]);
                sub_col(&mut h, c, p, &q);
                sub_col(&mut u, c, p, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                swap_col(&mut h, rank, p);
                swap_col(&mut u, rank, p);
                if h[i][rank].is_negative() {
                    neg_col(&mut h, rank);
                    neg_col(&mut u, rank);
                }
                pivot_of_row[i] = Some(rank);
                rank += 1;
                break;
            }
        }
    }

    let mut y: Vec<BigInt> = vec![BigInt::zero(); rank];
    for (i, row) in h.iter().enumerate() {
        let mut residual = rhs[i].clone();
        let known = pivot_of_row[i].unwrap_or_else(|| rank.min(vars));
        for c in 0..known.min(rank) {
            residual -= &row[c] * &y[c];
        }
        match pivot_of_row[i] {
            Some(p) => {
                let (quot, rem) = residual.div_rem(&row[p]);
                if !rem.is_zero() {
                    return None;
                }
                y[p] = quot;
            }
            None => {
                // columns past the current rank are zero in this row
                let tail_zero = (rank..vars).all(|c| row[c].is_zero());
                debug_assert!(tail_zero);
                if !residual.is_zero() {
                    return None;
                }
            }
        }
    }
    let base = (0..vars)
        .map(|r| (0..rank).map(|c| &u[r][c] * &y[c]).sum())
        .collect();
    let kernel = (rank..vars)
        .map(|c| (0..vars).map(|r| u[r][c].clone()).collect())
        .collect();
    Some(SolutionLattice { base, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(rows: &[Vec<i64>], rhs: &[i64]) -> Option<SolutionLattice> {
        let rows: Vec<_> = rows.iter().map(|r| big(r)).collect();
        let vars = rows.first().map_or(0, |r| r.len());
        let lattice = solution_lattice(&rows, &big(rhs), vars)?;
        for (row, b) in rows.iter().zip(big(rhs)) {
            let at_base: BigInt = row.iter().zip(&lattice.base).map(|(a, x)| a * x).sum();
            assert_eq!(at_base, b);
            for k in &lattice.kernel {
                let dot: BigInt = row.iter().zip(k).map(|(a, x)| a * x).sum();
                assert!(dot.is_zero());
            }
        }
        Some(lattice)
    }

    #[test]
    fn parity_obstruction() {
        assert!(check(&[vec![2]], &[1]).is_none());
        assert!(check(&[vec![2, 4]], &[3]).is_none());
    }

    #[test]
    fn one_equation_two_unknowns() {
        let l = check(&[vec![3, 5]], &[1]).unwrap();
        assert_eq!(l.kernel.len(), 1);
    }

    #[test]
    fn dependent_rows() {
        let l = check(&[vec![1, 1], vec![2, 2]], &[3, 6]).unwrap();
        assert_eq!(l.kernel.len(), 1);
        assert!(check(&[vec![1, 1], vec![2, 2]], &[3, 7]).is_none());
    }

    #[test]
    fn unique_solution() {
        let l = check(&[vec![1, 1], vec![1, -1]], &[4, 2]).unwrap();
        assert!(l.kernel.is_empty());
        assert_eq!(l.base, big(&[3, 1]));
        // rational but not integral
        assert!(check(&[vec![1, 1], vec![1, -1]], &[3, 0]).is_none());
    }

    #[test]
    fn zero_rows() {
        assert!(check(&[vec![0, 0]], &[1]).is_none());
        let l = check(&[vec![0, 0]], &[0]).unwrap();
        assert_eq!(l.kernel.len(), 2);
    }
}
