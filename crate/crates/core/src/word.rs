//! Words in a free group of finite rank.
//!
//! A symbol is a nonzero signed integer: `s > 0` stands for the generator
//! `x_s` and `-s` for its inverse. Words carry their rank explicitly so that
//! words built for different groups cannot be mixed by accident.

use std::fmt;

use thiserror::Error;

/// Signed generator symbol.
pub type Symbol = i32;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("rank must be positive")]
    ZeroRank,
    #[error("symbol {symbol} is not valid in a free group of rank {rank}")]
    BadSymbol { symbol: Symbol, rank: u32 },
    #[error("cannot combine words of rank {left} and rank {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("powers of the empty word have no infinite expansion")]
    EmptyPeriod,
    #[error("subword index must start at 1, got {0}")]
    ZeroStart(usize),
    #[error("malformed token {token:?} in word {text:?}")]
    BadToken { token: String, text: String },
    #[error("the literal `e` must stand alone, got {0:?}")]
    StrayIdentity(String),
    #[error("exponent {0} is too large to expand literally")]
    ExponentTooLarge(i64),
}

/// A (not necessarily reduced) word in the free group of rank `rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: u32,
    symbols: Vec<Symbol>,
}

/// `t = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub conjugator: Word,
    pub core: Word,
}

/// Upper bound on the length of a literally expanded power.
const MAX_EXPANSION: usize = 1 << 28;

impl Word {
    pub fn new(rank: u32, symbols: Vec<Symbol>) -> Result<Self, WordError> {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        if let Some(&symbol) = symbols
            .iter()
            .find(|s| **s == 0 || s.unsigned_abs() > rank)
        {
            return Err(WordError::BadSymbol { symbol, rank });
        }
        Ok(Self { rank, symbols })
    }

    pub fn empty(rank: u32) -> Self {
        assert!(rank > 0, "rank must be positive");
        Self {
            rank,
            symbols: Vec::new(),
        }
    }

    /// Parses the textual syntax: whitespace separated `x<i>` / `X<i>`
    /// tokens, or the single literal `e` for the empty word.
    pub fn parse(rank: u32, text: &str) -> Result<Self, WordError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.iter().any(|t| *t == "e") {
            if tokens.len() == 1 {
                return Word::new(rank, Vec::new());
            }
            return Err(WordError::StrayIdentity(text.to_string()));
        }
        let bad = |token: &str| WordError::BadToken {
            token: token.to_string(),
            text: text.to_string(),
        };
        let mut symbols = Vec::with_capacity(tokens.len());
        for token in tokens {
            let (sign, digits) = match token.as_bytes().first() {
                Some(b'x') => (1, &token[1..]),
                Some(b'X') => (-1, &token[1..]),
                _ => return Err(bad(token)),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad(token));
            }
            let index: Symbol = digits.parse().map_err(|_| bad(token))?;
            symbols.push(sign * index);
        }
        Word::new(rank, symbols)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// 1-based symbol access, matching the indexing used for band systems.
    pub fn symbol(&self, position: usize) -> Symbol {
        self.symbols[position - 1]
    }

    pub fn is_reduced(&self) -> bool {
        self.symbols.windows(2).all(|w| w[0] != -w[1])
    }

    /// Reduced, and the first symbol does not cancel against the last.
    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.symbols.first(), self.symbols.last()) {
                (Some(&first), Some(&last)) => self.symbols.len() == 1 || first != -last,
                _ => true,
            }
    }

    /// Free reduction by a single left-to-right stack pass.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Symbol> = Vec::with_capacity(self.symbols.len());
        for &s in &self.symbols {
            if out.last() == Some(&-s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Word {
            rank: self.rank,
            symbols: out,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            symbols: self.symbols.iter().rev().map(|s| -s).collect(),
        }
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Literal concatenation, no cancellation.
    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Ok(Word {
            rank: self.rank,
            symbols,
        })
    }

    /// Literal power; negative exponents expand copies of the inverse.
    pub fn pow(&self, exponent: i64) -> Result<Word, WordError> {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let copies = usize::try_from(exponent.unsigned_abs())
            .ok()
            .filter(|c| c.saturating_mul(base.len()) <= MAX_EXPANSION)
            .ok_or(WordError::ExponentTooLarge(exponent))?;
        Ok(Word {
            rank: self.rank,
            symbols: base.symbols.repeat(copies),
        })
    }

    /// `(self^∞)[start .. start + length - 1]`, indices 1-based.
    pub fn power_subword(&self, start: usize, length: usize) -> Result<Word, WordError> {
        if self.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        if start == 0 {
            return Err(WordError::ZeroStart(start));
        }
        let period = self.len();
        let symbols = (0..length)
            .map(|i| self.symbols[(start - 1 + i) % period])
            .collect();
        Ok(Word {
            rank: self.rank,
            symbols,
        })
    }

    /// `self[start .. start + length - 1]`, indices 1-based.
    pub fn subword(&self, start: usize, length: usize) -> Word {
        Word {
            rank: self.rank,
            symbols: self.symbols[start - 1..start - 1 + length].to_vec(),
        }
    }

    /// Splits a word into `u · t' · u⁻¹` with `t'` cyclically reduced and
    /// `u` as short as possible. The input is reduced first.
    pub fn cyclic_decompose(&self) -> CyclicDecomposition {
        let reduced = self.reduce();
        let s = &reduced.symbols;
        let mut peel = 0;
        while s.len() >= 2 * peel + 2 && s[peel] == -s[s.len() - 1 - peel] {
            peel += 1;
        }
        CyclicDecomposition {
            conjugator: Word {
                rank: self.rank,
                symbols: s[..peel].to_vec(),
            },
            core: Word {
                rank: self.rank,
                symbols: s[peel..s.len() - peel].to_vec(),
            },
        }
    }

    /// Signed exponent sum of each generator (the image in ℤ^rank).
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank as usize];
        for &s in &self.symbols {
            sums[s.unsigned_abs() as usize - 1] += i64::from(s.signum());
        }
        sums
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return f.write_str("e");
        }
        for (i, &s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let letter = if s > 0 { 'x' } else { 'X' };
            write!(f, "{}{}", letter, s.unsigned_abs())?;
        }
        Ok(())
    }
}
