//! Exact integer feasibility for systems of linear equations over free and
//! nonnegative integer variables.
//!
//! The equations are first solved over ℤ with a Hermite-style column
//! reduction, which turns the problem into finding a parameter vector `λ`
//! with `base + K λ ≥ 0` on the nonnegative coordinates. Coordinates that the
//! rational relaxation pins to zero are promoted to equations and the lattice
//! is recomputed. The remaining search is a depth-first branch and bound on
//! `λ`, using exact LP relaxations, inside boxes `|x_j| ≤ R` whose radius
//! doubles up to a bound beyond which no minimal solution can lie.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::hnf::{solution_lattice, SolutionLattice};
use super::simplex::{maximize, rational, LpOutcome};
use super::LatticeError;

/// Default node budget for [`LinearSystem::feasible`].
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Free,
    NonNegative,
}

/// Equations `Σ_j row[j] x_j = rhs` over integer variables with per-variable
/// domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    domains: Vec<Domain>,
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
}

impl LinearSystem {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self {
            domains,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn add_equation(&mut self, coefficients: Vec<BigInt>, rhs: BigInt) -> Result<(), LatticeError> {
        if coefficients.len() != self.domains.len() {
            return Err(LatticeError::Malformed(format!(
                "equation has {} coefficients for {} variables",
                coefficients.len(),
                self.domains.len()
            )));
        }
        self.rows.push(coefficients);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn variable_count(&self) -> usize {
        self.domains.len()
    }

    pub fn equation_count(&self) -> usize {
        self.rows.len()
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    /// Exact re-substitution check.
    pub fn is_satisfied_by(&self, x: &[BigInt]) -> bool {
        x.len() == self.domains.len()
            && self
                .domains
                .iter()
                .zip(x)
                .all(|(d, v)| *d == Domain::Free || !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                let lhs: BigInt = row.iter().zip(x).map(|(a, v)| a * v).sum();
                lhs == *b
            })
    }

    pub fn feasible(&self) -> Result<Option<Vec<BigInt>>, LatticeError> {
        self.feasible_with_budget(DEFAULT_BUDGET)
    }

    /// Returns a witness, `None` when no integer solution exists, or
    /// [`LatticeError::BudgetExhausted`] when the search ran out of nodes.
    pub fn feasible_with_budget(&self, budget: u64) -> Result<Option<Vec<BigInt>>, LatticeError> {
        let mut search = Search {
            budget,
            remaining: budget,
        };
        let witness = search.run(self)?;
        if let Some(x) = &witness {
            assert!(self.is_satisfied_by(x), "feasibility witness failed re-substitution");
        }
        Ok(witness)
    }

    /// Radius beyond which a feasible system always has a solution
    /// (Papadimitriou's bound `n (m a)^{2m+1}` on the standard form with free
    /// variables split in two).
    fn solution_radius(&self) -> BigInt {
        let m = self.rows.len().max(1);
        let n = self.domains.len()
            + self.domains.iter().filter(|d| **d == Domain::Free).count();
        let a = self
            .rows
            .iter()
            .flatten()
            .chain(&self.rhs)
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigInt::one)
            .max(BigInt::one());
        BigInt::from(n) * (BigInt::from(m) * a).pow(2 * m as u32 + 1)
    }
}

struct Search {
    budget: u64,
    remaining: u64,
}

/// Parameterized problem: find integer `λ` with `base + K λ ≥ 0` on `nonneg`.
struct Parameterized {
    lattice: SolutionLattice,
    nonneg: Vec<usize>,
}

impl Parameterized {
    fn point(&self, lambda: &[BigInt]) -> Vec<BigInt> {
        let mut x = self.lattice.base.clone();
        for (coef, column) in lambda.iter().zip(&self.lattice.kernel) {
            if coef.is_zero() {
                continue;
            }
            for (xi, ki) in x.iter_mut().zip(column) {
                *xi += coef * ki;
            }
        }
        x
    }

    /// Coefficients of coordinate `j` as an affine function of `λ`.
    fn coordinate(&self, j: usize) -> Vec<BigRational> {
        self.lattice.kernel.iter().map(|k| rational(&k[j])).collect()
    }

    /// `-x_j ≤ 0` rows for the nonnegative coordinates.
    fn nonneg_rows(&self) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let mut g = Vec::new();
        let mut h = Vec::new();
        for &j in &self.nonneg {
            g.push(self.coordinate(j).into_iter().map(|v| -v).collect());
            h.push(rational(&self.lattice.base[j]));
        }
        (g, h)
    }
}

impl Search {
    fn tick(&mut self) -> Result<(), LatticeError> {
        if self.remaining == 0 {
            return Err(LatticeError::BudgetExhausted(self.budget));
        }
        self.remaining -= 1;
        Ok(())
    }

    fn run(&mut self, system: &LinearSystem) -> Result<Option<Vec<BigInt>>, LatticeError> {
        let vars = system.variable_count();
        let mut rows = system.rows.clone();
        let mut rhs = system.rhs.clone();
        let nonneg: Vec<usize> = (0..vars)
            .filter(|&j| system.domains[j] == Domain::NonNegative)
            .collect();

        // promote implicit equalities x_j = 0 until none remain
        let problem = loop {
            let Some(lattice) = solution_lattice(&rows, &rhs, vars) else {
                return Ok(None);
            };
            let problem = Parameterized {
                lattice,
                nonneg: nonneg.clone(),
            };
            if problem.lattice.kernel.is_empty() {
                let x = problem.lattice.base.clone();
                let ok = nonneg.iter().all(|&j| !x[j].is_negative());
                return Ok(ok.then_some(x));
            }
            let (g, h) = problem.nonneg_rows();
            let mut pinned = None;
            for &j in &nonneg {
                self.tick()?;
                match maximize(&problem.coordinate(j), &g, &h) {
                    LpOutcome::Infeasible => return Ok(None),
                    LpOutcome::Unbounded => {}
                    LpOutcome::Optimal { value, .. } => {
                        let max = value + rational(&problem.lattice.base[j]);
                        if max.is_negative() {
                            return Ok(None);
                        }
                        if max.is_zero() && !is_fixed_zero(&problem, j) {
                            pinned = Some(j);
                            break;
                        }
                    }
                }
            }
            match pinned {
                Some(j) => {
                    let mut row = vec![BigInt::zero(); vars];
                    row[j] = BigInt::one();
                    rows.push(row);
                    rhs.push(BigInt::zero());
                }
                None => break problem,
            }
        };

        let zero = vec![BigInt::zero(); problem.lattice.kernel.len()];
        let origin = problem.point(&zero);
        if nonneg.iter().all(|&j| !origin[j].is_negative()) {
            return Ok(Some(origin));
        }

        let limit = system.solution_radius();
        let mut radius = BigInt::from(4);
        loop {
            let radius_now = if radius > limit { limit.clone() } else { radius.clone() };
            if let Some(lambda) = self.branch_and_bound(&problem, &radius_now)? {
                return Ok(Some(problem.point(&lambda)));
            }
            if radius_now >= limit {
                return Ok(None);
            }
            radius *= 2;
        }
    }

    /// Depth-first branch and bound inside the box `|x_j| ≤ radius`.
    fn branch_and_bound(
        &mut self,
        problem: &Parameterized,
        radius: &BigInt,
    ) -> Result<Option<Vec<BigInt>>, LatticeError> {
        let p = problem.lattice.kernel.len();
        let (mut g, mut h) = problem.nonneg_rows();
        let r = rational(radius);
        for j in 0..problem.lattice.base.len() {
            let coord = problem.coordinate(j);
            if coord.iter().all(Zero::is_zero) {
                continue;
            }
            let base = rational(&problem.lattice.base[j]);
            h.push(&r - &base);
            g.push(coord.clone());
            h.push(&r + &base);
            g.push(coord.into_iter().map(|v| -v).collect());
        }
        let zero_objective = vec![BigRational::zero(); p];

        // each node: per-parameter (lower, upper) integer bounds
        type Bounds = Vec<(Option<BigInt>, Option<BigInt>)>;
        let mut stack: Vec<Bounds> = vec![vec![(None, None); p]];
        while let Some(bounds) = stack.pop() {
            self.tick()?;
            let mut gg = g.clone();
            let mut hh = h.clone();
            for (i, (lo, hi)) in bounds.iter().enumerate() {
                if let Some(lo) = lo {
                    let mut row = vec![BigRational::zero(); p];
                    row[i] = -BigRational::one();
                    gg.push(row);
                    hh.push(-rational(lo));
                }
                if let Some(hi) = hi {
                    let mut row = vec![BigRational::zero(); p];
                    row[i] = BigRational::one();
                    gg.push(row);
                    hh.push(rational(hi));
                }
            }
            let point = match maximize(&zero_objective, &gg, &hh) {
                LpOutcome::Optimal { point, .. } => point,
                LpOutcome::Infeasible => continue,
                LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
            };
            match point.iter().position(|v| !v.is_integer()) {
                None => {
                    let lambda: Vec<BigInt> = point.iter().map(|v| v.to_integer()).collect();
                    return Ok(Some(lambda));
                }
                Some(i) => {
                    let floor = point[i].floor().to_integer();
                    let ceil = &floor + 1;
                    let mut up = bounds.clone();
                    up[i].0 = Some(ceil);
                    let mut down = bounds;
                    down[i].1 = Some(floor);
                    // explore the side nearer to the origin of λ first
                    if point[i].is_negative() {
                        stack.push(down);
                        stack.push(up);
                    } else {
                        stack.push(up);
                        stack.push(down);
                    }
                }
            }
        }
        Ok(None)
    }
}

fn is_fixed_zero(problem: &Parameterized, j: usize) -> bool {
    problem.lattice.base[j].is_zero() && problem.lattice.kernel.iter().all(|k| k[j].is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(domains: &[Domain], eqs: &[(&[i64], i64)]) -> LinearSystem {
        let mut s = LinearSystem::new(domains.to_vec());
        for (row, b) in eqs {
            s.add_equation(row.iter().map(|&v| BigInt::from(v)).collect(), BigInt::from(*b))
                .unwrap();
        }
        s
    }

    use Domain::{Free, NonNegative as Nn};

    #[test]
    fn single_value() {
        let s = system(&[Nn], &[(&[1], 3)]);
        assert_eq!(s.feasible().unwrap(), Some(vec![BigInt::from(3)]));
    }

    #[test]
    fn parity_obstruction() {
        let s = system(&[Free], &[(&[2], 1)]);
        assert_eq!(s.feasible().unwrap(), None);
    }

    #[test]
    fn difference_of_nonnegatives() {
        let s = system(&[Nn, Nn], &[(&[1, -1], 2)]);
        let x = s.feasible().unwrap().unwrap();
        assert!(s.is_satisfied_by(&x));
    }

    #[test]
    fn malformed_equation() {
        let mut s = LinearSystem::new(vec![Free, Free]);
        assert!(matches!(
            s.add_equation(vec![BigInt::one()], BigInt::zero()),
            Err(LatticeError::Malformed(_))
        ));
    }

    #[test]
    fn sign_obstruction() {
        // x + y = -1 with both nonnegative
        let s = system(&[Nn, Nn], &[(&[1, 1], -1)]);
        assert_eq!(s.feasible().unwrap(), None);
    }

    #[test]
    fn implicit_equality_with_parity() {
        // x1 - x2 = 2 t + 1 and x1 + x2 = 0 forces x1 = x2 = 0, t = -1/2
        let s = system(&[Nn, Nn, Free], &[(&[1, -1, -2], 1), (&[1, 1, 0], 0)]);
        assert_eq!(s.feasible().unwrap(), None);
    }

    #[test]
    fn knapsack_without_solution() {
        // 3a + 5b = 7, a, b ≥ 0
        let s = system(&[Nn, Nn], &[(&[3, 5], 7)]);
        assert_eq!(s.feasible().unwrap(), None);
        let s = system(&[Nn, Nn], &[(&[3, 5], 8)]);
        assert!(s.feasible().unwrap().is_some());
    }

    #[test]
    fn needs_large_witness() {
        // 7a - 9b = 1000 with a, b ≥ 0 and a ≤ b + 200 style coupling
        let s = system(&[Nn, Nn], &[(&[7, -9], 1000)]);
        let x = s.feasible().unwrap().unwrap();
        assert!(s.is_satisfied_by(&x));
    }

    #[test]
    fn no_equations() {
        let s = system(&[Nn, Free], &[]);
        assert_eq!(s.feasible().unwrap(), Some(vec![BigInt::zero(), BigInt::zero()]));
    }

    #[test]
    fn budget_is_reported() {
        let s = system(&[Nn, Nn, Nn], &[(&[3, 5, 7], 1)]);
        assert!(matches!(
            s.feasible_with_budget(1),
            Err(LatticeError::BudgetExhausted(1))
        ));
    }
}
