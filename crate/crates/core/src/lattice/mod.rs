//! Semilinear sets `⋃_j {z_j + M_j v : v ∈ ℤ≥0^{d_j}}` and the integer
//! feasibility engine behind their queries.

mod hnf;
mod simplex;
mod system;

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use system::{Domain, LinearSystem, DEFAULT_BUDGET};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("malformed linear system: {0}")]
    Malformed(String),
    #[error("expected a vector of length {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("feasibility search exhausted its budget of {0} nodes")]
    BudgetExhausted(u64),
    #[error("invalid solution-set document: {0}")]
    Format(String),
}

/// `{base + generators · v : v ∈ ℤ≥0^d}`; generators are stored as columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearSet {
    base: Vec<BigInt>,
    generators: Vec<Vec<BigInt>>,
}

impl LinearSet {
    pub fn new(base: Vec<BigInt>, generators: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        if let Some(bad) = generators.iter().find(|c| c.len() != base.len()) {
            return Err(LatticeError::ArityMismatch {
                expected: base.len(),
                got: bad.len(),
            });
        }
        Ok(Self { base, generators })
    }

    pub fn singleton(base: Vec<BigInt>) -> Self {
        Self {
            base,
            generators: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[BigInt] {
        &self.base
    }

    /// Generator columns, each of length `arity`.
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    /// `z + M v`.
    pub fn point(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.generators.len(), "coefficient vector length");
        let mut out = self.base.clone();
        for (coef, column) in v.iter().zip(&self.generators) {
            for (o, c) in out.iter_mut().zip(column) {
                *o += coef * c;
            }
        }
        out
    }

    pub fn contains(&self, k: &[BigInt], budget: u64) -> Result<bool, LatticeError> {
        if k.len() != self.arity() {
            return Err(LatticeError::ArityMismatch {
                expected: self.arity(),
                got: k.len(),
            });
        }
        if self.generators.is_empty() {
            return Ok(self.base == k);
        }
        let mut system = LinearSystem::new(vec![Domain::NonNegative; self.dimension()]);
        for i in 0..self.arity() {
            let row = self.generators.iter().map(|c| c[i].clone()).collect();
            system.add_equation(row, &k[i] - &self.base[i])?;
        }
        Ok(system.feasible_with_budget(budget)?.is_some())
    }

    /// Drops zero columns, sorts the rest and removes repeated columns.
    fn canonical(mut self) -> Self {
        self.generators.retain(|c| c.iter().any(|v| !v.is_zero()));
        self.generators.sort();
        self.generators.dedup();
        self
    }

    /// Applies `k_i ↦ sign_i k_i` to every point of the set.
    pub fn reflect(&self, signs: &[i8]) -> Self {
        let flip = |v: &[BigInt]| -> Vec<BigInt> {
            v.iter()
                .zip(signs)
                .map(|(x, &s)| if s < 0 { -x } else { x.clone() })
                .collect()
        };
        Self {
            base: flip(&self.base),
            generators: self.generators.iter().map(|c| flip(c)).collect(),
        }
    }
}

/// A finite union of linear sets of a common arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    arity: usize,
    components: Vec<LinearSet>,
}

impl SolutionSet {
    pub fn empty(arity: usize) -> Self {
        Self {
            arity,
            components: Vec::new(),
        }
    }

    pub fn new(arity: usize, components: Vec<LinearSet>) -> Result<Self, LatticeError> {
        if let Some(bad) = components.iter().find(|c| c.arity() != arity) {
            return Err(LatticeError::ArityMismatch {
                expected: arity,
                got: bad.arity(),
            });
        }
        Ok(Self { arity, components })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    pub fn push(&mut self, component: LinearSet) -> Result<(), LatticeError> {
        if component.arity() != self.arity {
            return Err(LatticeError::ArityMismatch {
                expected: self.arity,
                got: component.arity(),
            });
        }
        self.components.push(component);
        Ok(())
    }

    /// Every linear set contains its base point, so only the empty union is
    /// empty.
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn member(&self, k: &[BigInt]) -> Result<bool, LatticeError> {
        self.member_with_budget(k, DEFAULT_BUDGET)
    }

    pub fn member_with_budget(&self, k: &[BigInt], budget: u64) -> Result<bool, LatticeError> {
        if k.len() != self.arity {
            return Err(LatticeError::ArityMismatch {
                expected: self.arity,
                got: k.len(),
            });
        }
        for component in &self.components {
            if component.contains(k, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Syntactic cleanup: canonical generator columns, duplicate components
    /// removed, components sorted.
    pub fn simplify(&self) -> SolutionSet {
        let mut components: Vec<LinearSet> = self
            .components
            .iter()
            .cloned()
            .map(LinearSet::canonical)
            .collect();
        components.sort_by(compare_components);
        components.dedup();
        SolutionSet {
            arity: self.arity,
            components,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = SolutionSetDoc {
            arity: self.arity,
            components: self
                .components
                .iter()
                .map(|c| ComponentDoc {
                    z: c.base.iter().map(number).collect(),
                    m: (0..self.arity)
                        .map(|i| c.generators.iter().map(|col| number(&col[i])).collect())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("solution sets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let doc: SolutionSetDoc =
            serde_json::from_str(text).map_err(|e| LatticeError::Format(e.to_string()))?;
        let mut components = Vec::with_capacity(doc.components.len());
        for (j, c) in doc.components.into_iter().enumerate() {
            let context = |msg: String| LatticeError::Format(format!("component {j}: {msg}"));
            if c.z.len() != doc.arity {
                return Err(context(format!("z has length {}, arity is {}", c.z.len(), doc.arity)));
            }
            if c.m.len() != doc.arity {
                return Err(context(format!("M has {} rows, arity is {}", c.m.len(), doc.arity)));
            }
            let d = c.m.first().map_or(0, Vec::len);
            if let Some(i) = c.m.iter().position(|row| row.len() != d) {
                return Err(context(format!("M row {i} is ragged")));
            }
            let z = c.z.iter().map(integer).collect::<Result<Vec<_>, _>>().map_err(context)?;
            let mut generators = vec![Vec::with_capacity(doc.arity); d];
            for row in &c.m {
                for (col, value) in generators.iter_mut().zip(row) {
                    col.push(integer(value).map_err(context)?);
                }
            }
            components.push(LinearSet::new(z, generators)?);
        }
        SolutionSet::new(doc.arity, components)
    }
}

fn compare_components(a: &LinearSet, b: &LinearSet) -> Ordering {
    (a.dimension(), &a.base, &a.generators).cmp(&(b.dimension(), &b.base, &b.generators))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionSetDoc {
    arity: usize,
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    z: Vec<serde_json::Number>,
    #[serde(rename = "M")]
    m: Vec<Vec<serde_json::Number>>,
}

fn number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

fn integer(n: &serde_json::Number) -> Result<BigInt, String> {
    BigInt::from_str(&n.to_string()).map_err(|_| format!("{n} is not an integer"))
}

/// Parses `"k1,k2,..."` (the empty string is the empty vector).
pub fn parse_point(text: &str) -> Result<Vec<BigInt>, LatticeError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            BigInt::from_str(t.trim())
                .map_err(|_| LatticeError::Format(format!("{t:?} is not an integer")))
        })
        .collect()
}
