use super::{EquationInstance, SolveError};
use crate::word::Word;

/// An instance whose periods are nonempty and cyclically reduced and whose
/// constant words are reduced, plus the bookkeeping needed to map its
/// solutions back to the original coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedInstance {
    instance: EquationInstance,
    conjugators: Vec<Word>,
    kept: Vec<usize>,
    eliminated: Vec<usize>,
    original_arity: usize,
}

impl NormalizedInstance {
    pub fn instance(&self) -> &EquationInstance {
        &self.instance
    }

    /// Conjugator `u_i` folded out of each original period.
    pub fn conjugators(&self) -> &[Word] {
        &self.conjugators
    }

    /// Original (0-based) coordinate of each remaining coordinate.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// Original coordinates whose period was trivial; they are free in the
    /// solution set and get reinserted by [`super::solve`].
    pub fn eliminated(&self) -> &[usize] {
        &self.eliminated
    }

    pub fn original_arity(&self) -> usize {
        self.original_arity
    }
}

/// Conjugates every `t_i = u_i t'_i u_i⁻¹` down to its cyclic core (folding
/// `u_i` into the neighbouring constants), then removes coordinates whose
/// period is trivial by merging the constants on either side.
pub fn normalize(instance: &EquationInstance) -> Result<NormalizedInstance, SolveError> {
    let rank = instance.rank();
    let l = instance.arity();
    let mut words: Vec<Word> = instance.words().iter().map(Word::reduce).collect();
    let mut periods = Vec::with_capacity(l);
    let mut conjugators = Vec::with_capacity(l);
    for (i, t) in instance.periods().iter().enumerate() {
        let split = t.cyclic_decompose();
        words[i] = words[i].concat(&split.conjugator)?.reduce();
        words[i + 1] = split.conjugator.inverse().concat(&words[i + 1])?.reduce();
        periods.push(split.core);
        conjugators.push(split.conjugator);
    }

    let mut kept = Vec::with_capacity(l);
    let mut eliminated = Vec::new();
    let mut merged_words = vec![words[0].clone()];
    let mut merged_periods = Vec::with_capacity(l);
    for i in 0..l {
        if periods[i].is_empty() {
            eliminated.push(i);
            let last = merged_words.pop().expect("at least one constant");
            merged_words.push(last.concat(&words[i + 1])?.reduce());
        } else {
            kept.push(i);
            merged_periods.push(periods[i].clone());
            merged_words.push(words[i + 1].clone());
        }
    }
    Ok(NormalizedInstance {
        instance: EquationInstance::new(rank, merged_words, merged_periods)?,
        conjugators,
        kept,
        eliminated,
        original_arity: l,
    })
}
