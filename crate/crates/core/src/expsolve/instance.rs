use serde::{Deserialize, Serialize};

use super::SolveError;
use crate::word::Word;

/// The equation `w₀ t₁^k₁ w₁ ⋯ t_l^k_l w_l = 1` over a free group of rank `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationInstance {
    rank: u32,
    words: Vec<Word>,
    periods: Vec<Word>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    g: u32,
    w: Vec<String>,
    t: Vec<String>,
}

impl EquationInstance {
    /// `words` holds `w₀ … w_l`, `periods` holds `t₁ … t_l`.
    pub fn new(rank: u32, words: Vec<Word>, periods: Vec<Word>) -> Result<Self, SolveError> {
        if words.len() != periods.len() + 1 {
            return Err(SolveError::Instance(format!(
                "{} constant words for {} powers; expected exactly one more",
                words.len(),
                periods.len()
            )));
        }
        if let Some(bad) = words.iter().chain(&periods).find(|w| w.rank() != rank) {
            return Err(SolveError::Instance(format!(
                "word {bad} has rank {}, instance has rank {rank}",
                bad.rank()
            )));
        }
        Ok(Self {
            rank,
            words,
            periods,
        })
    }

    /// Builds an instance from textual words.
    pub fn parse(rank: u32, words: &[&str], periods: &[&str]) -> Result<Self, SolveError> {
        let parse = |s: &&str| Word::parse(rank, s);
        Self::new(
            rank,
            words.iter().map(parse).collect::<Result<_, _>>()?,
            periods.iter().map(parse).collect::<Result<_, _>>()?,
        )
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn arity(&self) -> usize {
        self.periods.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn periods(&self) -> &[Word] {
        &self.periods
    }

    /// Total constant length `|w₀| + ⋯ + |w_l|`.
    pub fn constant_length(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }

    fn check_arity(&self, got: usize) -> Result<(), SolveError> {
        if got != self.arity() {
            return Err(SolveError::ArityMismatch {
                expected: self.arity(),
                got,
            });
        }
        Ok(())
    }

    /// The literal, unreduced word `w₀ t₁^k₁ w₁ ⋯ t_l^k_l w_l`.
    pub fn instantiate(&self, k: &[i64]) -> Result<Word, SolveError> {
        self.check_arity(k.len())?;
        let mut out = self.words[0].clone();
        for (i, &power) in k.iter().enumerate() {
            out = out.concat(&self.periods[i].pow(power)?)?;
            out = out.concat(&self.words[i + 1])?;
        }
        Ok(out)
    }

    pub fn is_solution(&self, k: &[i64]) -> Result<bool, SolveError> {
        Ok(self.instantiate(k)?.reduce().is_empty())
    }

    /// Every solution in `[-radius, radius]^l`, in lexicographic order.
    pub fn brute_force(&self, radius: i64) -> Result<Vec<Vec<i64>>, SolveError> {
        let l = self.arity();
        let mut out = Vec::new();
        let mut k = vec![-radius; l];
        loop {
            if self.is_solution(&k)? {
                out.push(k.clone());
            }
            let Some(i) = (0..l).rev().find(|&i| k[i] < radius) else {
                break;
            };
            k[i] += 1;
            for v in &mut k[i + 1..] {
                *v = -radius;
            }
        }
        Ok(out)
    }

    /// Parses `{ "g": 2, "w": ["x1 x2", "e"], "t": ["x1 X2"] }`.
    pub fn from_json(text: &str) -> Result<Self, SolveError> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| SolveError::Instance(e.to_string()))?;
        let parse_all = |field: &str, items: &[String]| -> Result<Vec<Word>, SolveError> {
            items
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Word::parse(doc.g, s)
                        .map_err(|e| SolveError::Instance(format!("{field}[{i}]: {e}")))
                })
                .collect()
        };
        let words = parse_all("w", &doc.w)?;
        let periods = parse_all("t", &doc.t)?;
        Self::new(doc.g, words, periods)
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceDoc {
            g: self.rank,
            w: self.words.iter().map(Word::to_string).collect(),
            t: self.periods.iter().map(Word::to_string).collect(),
        };
        serde_json::to_string(&doc).expect("instances serialize")
    }
}
