//! Solution sets of `w₀ t₁^k₁ w₁ ⋯ t_l^k_l w_l = 1` as finite unions of
//! linear sets.

mod classes;
mod instance;
mod labels;
mod normalize;
mod progression;

use std::num::NonZeroUsize;

use num_bigint::BigInt;
use thiserror::Error;

pub use classes::{cancelling_classes, compositions, crt, enumerate_classes, ClassValue, FloatingBand, UnbundlingClass};
pub use instance::EquationInstance;
pub use labels::{label_bundle, labelled_bundles, BandKind, Label, LabelledBundle};
pub use normalize::{normalize, NormalizedInstance};
pub use progression::{assemble, progression, Progression};

use crate::bands::{extract_cancellation, BandError, MarkedBandSystem};
use crate::lattice::{LatticeError, LinearSet, SolutionSet};
use crate::word::{Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("expected {expected} exponents, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid bundle: {0}")]
    Bundle(String),
    #[error("power block total {value} is not a multiple of the period length {modulus}")]
    Divisibility { value: usize, modulus: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `2(|w₀| + ⋯ + |w_l|) + l(l − 1)`: no cancellation bundle is longer.
pub fn length_bound(instance: &EquationInstance) -> usize {
    let l = instance.arity();
    2 * instance.constant_length() + l * l.saturating_sub(1)
}

/// One sign branch of a normalized instance: periods with `ε_i = −1` are
/// inverted so that only nonnegative exponents need to be found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveContext {
    branch: EquationInstance,
    signs: Vec<i8>,
    bound: usize,
}

impl SolveContext {
    /// `instance` must have nonempty, cyclically reduced periods.
    pub fn new(instance: &EquationInstance, signs: Vec<i8>) -> Result<Self, SolveError> {
        if signs.len() != instance.arity() {
            return Err(SolveError::ArityMismatch {
                expected: instance.arity(),
                got: signs.len(),
            });
        }
        if let Some(t) = instance
            .periods()
            .iter()
            .find(|t| t.is_empty() || !t.is_cyclically_reduced())
        {
            return Err(SolveError::Instance(format!(
                "period {t} is not a nonempty cyclically reduced word"
            )));
        }
        let periods = instance
            .periods()
            .iter()
            .zip(&signs)
            .map(|(t, &s)| if s < 0 { t.inverse() } else { t.clone() })
            .collect();
        let branch = EquationInstance::new(instance.rank(), instance.words().to_vec(), periods)?;
        let bound = length_bound(&branch);
        Ok(Self {
            branch,
            signs,
            bound,
        })
    }

    /// The branch containing `k` (zero coordinates go to the positive
    /// branch) and `k` in branch coordinates.
    pub fn containing(instance: &EquationInstance, k: &[i64]) -> Result<(Self, Vec<i64>), SolveError> {
        let signs = k.iter().map(|&v| if v < 0 { -1 } else { 1 }).collect();
        let ctx = Self::new(instance, signs)?;
        Ok((ctx, k.iter().map(|v| v.abs()).collect()))
    }

    /// The instance with periods inverted per the sign vector.
    pub fn branch(&self) -> &EquationInstance {
        &self.branch
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    fn word_lengths(&self) -> Vec<usize> {
        self.branch.words().iter().map(Word::len).collect()
    }

    /// Every candidate cancellation bundle for this branch.
    pub fn bundles(&self) -> Vec<LabelledBundle> {
        labelled_bundles(&self.word_lengths(), self.bound)
    }

    /// Linear sets (in branch coordinates) contributed by one bundle.
    pub fn solve_bundle(&self, bundle: &LabelledBundle) -> Result<Vec<LinearSet>, SolveError> {
        let mut out = Vec::new();
        for class in cancelling_classes(&self.branch, bundle) {
            if let Some(set) = assemble(&self.branch, bundle, &class)? {
                out.push(set);
            }
        }
        Ok(out)
    }

    /// The maximal bundle of the stack cancellation of `w(k)` under the
    /// block marking, for `k ≥ 0` in branch coordinates. `None` when `w(k)`
    /// is not trivial.
    pub fn cancellation_bundle(&self, k: &[i64]) -> Result<Option<MarkedBandSystem>, SolveError> {
        if let Some(&bad) = k.iter().find(|&&v| v < 0) {
            return Err(SolveError::Instance(format!(
                "exponent {bad} is negative in a nonnegative branch"
            )));
        }
        let word = self.branch.instantiate(k)?;
        let Some(system) = extract_cancellation(&word) else {
            return Ok(None);
        };
        let mut marks = vec![0];
        let mut at = 0;
        for (i, w) in self.branch.words().iter().enumerate() {
            at += w.len();
            marks.push(at);
            if i < k.len() {
                at += k[i] as usize * self.branch.periods()[i].len();
                marks.push(at);
            }
        }
        let marked = MarkedBandSystem::new(system, marks)?;
        Ok(Some(marked.maximal_bundle().0))
    }

    /// Nonnegative solutions of the branch, in branch coordinates.
    pub fn solve_nonneg(&self, jobs: NonZeroUsize) -> Result<SolutionSet, SolveError> {
        let bundles = self.bundles();
        let chunk = bundles.len().div_ceil(jobs.get()).max(1);
        let parts: Vec<Result<Vec<LinearSet>, SolveError>> = if jobs.get() == 1 {
            vec![self.solve_chunk(&bundles)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = bundles
                    .chunks(chunk)
                    .map(|part| scope.spawn(move || self.solve_chunk(part)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("solver worker panicked"))
                    .collect()
            })
        };
        let mut set = SolutionSet::empty(self.branch.arity());
        for part in parts {
            for component in part? {
                set.push(component)?;
            }
        }
        Ok(set.simplify())
    }

    fn solve_chunk(&self, bundles: &[LabelledBundle]) -> Result<Vec<LinearSet>, SolveError> {
        let mut out = Vec::new();
        for bundle in bundles {
            out.extend(self.solve_bundle(bundle)?);
        }
        Ok(out)
    }
}

/// The full solution set of `instance`.
pub fn solve(instance: &EquationInstance) -> Result<SolutionSet, SolveError> {
    solve_with(instance, NonZeroUsize::MIN)
}

/// [`solve`] with the bundle search spread over `jobs` threads. The result
/// does not depend on `jobs`.
pub fn solve_with(instance: &EquationInstance, jobs: NonZeroUsize) -> Result<SolutionSet, SolveError> {
    let normalized = normalize(instance)?;
    let reduced = normalized.instance();
    let l = reduced.arity();
    let mut set = SolutionSet::empty(l);
    if l == 0 {
        if reduced.words()[0].reduce().is_empty() {
            set.push(LinearSet::singleton(Vec::new()))?;
        }
    } else {
        for mask in 0..1u64 << l {
            let signs: Vec<i8> = (0..l).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let ctx = SolveContext::new(reduced, signs)?;
            for component in ctx.solve_nonneg(jobs)?.components() {
                set.push(component.reflect(ctx.signs()))?;
            }
        }
    }
    Ok(lift(&normalized, &set).simplify())
}

/// Reinserts eliminated coordinates as free integers.
fn lift(normalized: &NormalizedInstance, set: &SolutionSet) -> SolutionSet {
    let arity = normalized.original_arity();
    let kept = normalized.kept();
    let embed = |v: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::from(0); arity];
        for (&i, x) in kept.iter().zip(v) {
            out[i] = x.clone();
        }
        out
    };
    let mut out = SolutionSet::empty(arity);
    for component in set.components() {
        let mut generators: Vec<Vec<BigInt>> = component.generators().iter().map(|c| embed(c)).collect();
        for &i in normalized.eliminated() {
            for sign in [1, -1] {
                let mut unit = vec![BigInt::from(0); arity];
                unit[i] = BigInt::from(sign);
                generators.push(unit);
            }
        }
        let lifted = LinearSet::new(embed(component.base()), generators).expect("lifted columns match arity");
        out.push(lifted).expect("lifted components match arity");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(xs: &[&[i64]]) -> Vec<Vec<BigInt>> {
        xs.iter().map(|p| p.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn check_against_brute_force(instance: &EquationInstance, radius: i64) {
        let set = solve(instance).unwrap();
        let oracle = instance.brute_force(radius).unwrap();
        let l = instance.arity();
        let mut k = vec![-radius; l];
        loop {
            let big: Vec<BigInt> = k.iter().map(|&v| BigInt::from(v)).collect();
            assert_eq!(
                set.member(&big).unwrap(),
                oracle.contains(&k),
                "instance {} at {k:?}",
                instance.to_json()
            );
            let Some(i) = (0..l).rev().find(|&i| k[i] < radius) else { break };
            k[i] += 1;
            for v in &mut k[i + 1..] {
                *v = -radius;
            }
        }
    }

    #[test]
    fn single_power_with_constant() {
        let i = EquationInstance::parse(1, &["x1", "e"], &["x1"]).unwrap();
        let s = solve(&i).unwrap();
        assert_eq!(s.components(), &[LinearSet::singleton(points(&[&[-1]])[0].clone())]);
    }

    #[test]
    fn bare_power() {
        let i = EquationInstance::parse(1, &["e", "e"], &["x1"]).unwrap();
        let s = solve(&i).unwrap();
        assert_eq!(s.components(), &[LinearSet::singleton(points(&[&[0]])[0].clone())]);
    }

    #[test]
    fn antidiagonal() {
        let i = EquationInstance::parse(1, &["e", "e", "e"], &["x1", "x1"]).unwrap();
        let s = solve(&i).unwrap();
        for p in points(&[&[0, 0], &[3, -3], &[-5, 5]]) {
            assert!(s.member(&p).unwrap());
        }
        for p in points(&[&[1, 0], &[2, 2], &[-1, -1]]) {
            assert!(!s.member(&p).unwrap());
        }
        check_against_brute_force(&i, 5);
    }

    #[test]
    fn conjugated_period() {
        let i = EquationInstance::parse(2, &["x1 x2 X1", "e"], &["x1 X2 X1"]).unwrap();
        let s = solve(&i).unwrap();
        assert_eq!(s.components(), &[LinearSet::singleton(points(&[&[1]])[0].clone())]);
        check_against_brute_force(&i, 6);
    }

    #[test]
    fn arity_zero() {
        let yes = EquationInstance::parse(1, &["x1 X1"], &[]).unwrap();
        assert_eq!(solve(&yes).unwrap().components(), &[LinearSet::singleton(Vec::new())]);
        let no = EquationInstance::parse(1, &["x1"], &[]).unwrap();
        assert!(solve(&no).unwrap().is_empty());
    }

    #[test]
    fn eliminated_coordinate_is_free() {
        let i = EquationInstance::parse(1, &["x1", "X1 x1", "e"], &["x1 X1", "x1"]).unwrap();
        let s = solve(&i).unwrap();
        for p in points(&[&[0, -1], &[7, -1], &[-3, -1]]) {
            assert!(s.member(&p).unwrap());
        }
        assert!(!s.member(&points(&[&[0, 0]])[0]).unwrap());
    }

    #[test]
    fn empty_constants_zero_bound() {
        let i = EquationInstance::parse(2, &["e", "e"], &["x1 x2"]).unwrap();
        let ctx = SolveContext::new(&i, vec![1]).unwrap();
        assert_eq!(ctx.bound(), 0);
        let s = ctx.solve_nonneg(NonZeroUsize::MIN).unwrap();
        assert_eq!(s.components(), &[LinearSet::singleton(points(&[&[0]])[0].clone())]);
    }

    #[test]
    fn negative_branch_contributes_reflected_point() {
        let i = EquationInstance::parse(1, &["x1", "e"], &["x1"]).unwrap();
        let ctx = SolveContext::new(&i, vec![-1]).unwrap();
        let s = ctx.solve_nonneg(NonZeroUsize::MIN).unwrap();
        assert_eq!(s.components(), &[LinearSet::singleton(points(&[&[1]])[0].clone())]);
        assert_eq!(s.components()[0].reflect(&[-1]).base(), &points(&[&[-1]])[0][..]);
    }

    #[test]
    fn mixed_instances_match_brute_force() {
        let cases: &[(u32, &[&str], &[&str])] = &[
            (2, &["x1 x2", "X2", "X1"], &["x2", "x1 x2"]),
            (2, &["x1", "x2 x1", "e"], &["X1", "X2"]),
            (2, &["x1 x1", "e", "x2"], &["X1", "X2 x1"]),
            (1, &["x1 x1 x1", "e", "e"], &["X1", "x1 x1"]),
            (2, &["e", "x2", "e"], &["x1 x2", "X1 X2"]),
            (2, &["x2 x1", "X2 X1"], &["x1 x2"]),
        ];
        for (g, w, t) in cases {
            let i = EquationInstance::parse(*g, w, t).unwrap();
            check_against_brute_force(&i, 4);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let i = EquationInstance::parse(2, &["x1 x2", "X2", "X1"], &["x2", "x1 x2"]).unwrap();
        let a = solve(&i).unwrap();
        let b = solve_with(&i, NonZeroUsize::new(4).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cancellation_bundle_is_enumerated() {
        let i = EquationInstance::parse(2, &["x1 x2", "X2", "X1"], &["x2", "x1 x2"]).unwrap();
        let n = normalize(&i).unwrap();
        for k in n.instance().brute_force(4).unwrap() {
            let (ctx, abs) = SolveContext::containing(n.instance(), &k).unwrap();
            let bundle = ctx.cancellation_bundle(&abs).unwrap().unwrap();
            assert!(bundle.length() <= ctx.bound());
            assert!(ctx.bundles().iter().any(|b| b.bundle() == &bundle));
        }
    }
}
