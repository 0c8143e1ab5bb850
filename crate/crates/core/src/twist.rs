//! Deciding whether a twist-adjusted handlebody map extends, given the
//! meridian images algebraically.
//!
//! Meridian `r` becomes `w_{r,0} t_{r,1}^{H(i(r,1))} w_{r,1} ⋯ t_{r,l}^{H(i(r,l))} w_{r,l}`
//! where `H(i) = h_i` for `i ≤ m` and `H(i) = −h_{i−m}` otherwise. The map
//! extends for `h` exactly when every such word is trivial.

use std::num::NonZeroUsize;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expsolve::{solve_with, EquationInstance, SolveError};
use crate::lattice::{Domain, LatticeError, LinearSet, LinearSystem, SolutionSet, DEFAULT_BUDGET};
use crate::word::{Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("invalid extension instance: {0}")]
    Instance(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// One intersection of a meridian with a twist curve: the conjugated curve
/// class `t`, the connector `w` that follows it, and the curve index in
/// `1..=2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistCrossing {
    t: Word,
    w: Word,
    curve: usize,
}

impl TwistCrossing {
    pub fn new(t: Word, w: Word, curve: usize) -> Result<Self, ExtensionError> {
        if t.reduce().is_empty() {
            return Err(ExtensionError::Instance(format!(
                "crossing with curve {curve} has a trivial curve class"
            )));
        }
        Ok(Self { t, w, curve })
    }

    pub fn t(&self) -> &Word {
        &self.t
    }

    pub fn w(&self) -> &Word {
        &self.w
    }

    pub fn curve(&self) -> usize {
        self.curve
    }
}

/// The crossings met along one meridian, after an initial connector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistTrace {
    lead: Word,
    crossings: Vec<TwistCrossing>,
}

impl TwistTrace {
    pub fn new(lead: Word, crossings: Vec<TwistCrossing>) -> Self {
        Self { lead, crossings }
    }

    pub fn lead(&self) -> &Word {
        &self.lead
    }

    pub fn crossings(&self) -> &[TwistCrossing] {
        &self.crossings
    }

    /// The exponential equation in the per-crossing exponents.
    pub fn equation(&self) -> Result<EquationInstance, ExtensionError> {
        let mut words = vec![self.lead.clone()];
        let mut periods = Vec::with_capacity(self.crossings.len());
        for c in &self.crossings {
            periods.push(c.t.clone());
            words.push(c.w.clone());
        }
        Ok(EquationInstance::new(self.lead.rank(), words, periods)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionInstance {
    rank: u32,
    pairs: usize,
    traces: Vec<TwistTrace>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionDoc {
    g: u32,
    m: usize,
    traces: Vec<Vec<PieceDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curve: Option<usize>,
}

impl ExtensionInstance {
    pub fn new(rank: u32, pairs: usize, traces: Vec<TwistTrace>) -> Result<Self, ExtensionError> {
        if traces.len() != rank as usize {
            return Err(ExtensionError::Instance(format!(
                "{} traces for rank {rank}; expected one per meridian",
                traces.len()
            )));
        }
        for (r, trace) in traces.iter().enumerate() {
            let words = std::iter::once(&trace.lead)
                .chain(trace.crossings.iter().flat_map(|c| [&c.t, &c.w]));
            if let Some(bad) = words.into_iter().find(|w| w.rank() != rank) {
                return Err(ExtensionError::Instance(format!(
                    "trace {r}: word {bad} has rank {}, instance has rank {rank}",
                    bad.rank()
                )));
            }
            if let Some(c) = trace.crossings.iter().find(|c| c.curve == 0 || c.curve > 2 * pairs) {
                return Err(ExtensionError::Instance(format!(
                    "trace {r}: curve index {} outside 1..={}",
                    c.curve,
                    2 * pairs
                )));
            }
        }
        Ok(Self {
            rank,
            pairs,
            traces,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// `m`, the number of twist pairs.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn traces(&self) -> &[TwistTrace] {
        &self.traces
    }

    /// Exponent of curve `i` (1-based) under `h`, with `h_{m+s} = −h_s`.
    fn exponent(&self, h: &[i64], curve: usize) -> i64 {
        if curve <= self.pairs {
            h[curve - 1]
        } else {
            -h[curve - self.pairs - 1]
        }
    }

    /// Whether every meridian word becomes trivial under `h`.
    pub fn is_witness(&self, h: &[i64]) -> Result<bool, ExtensionError> {
        if h.len() != self.pairs {
            return Err(ExtensionError::Instance(format!(
                "witness has length {}, expected {}",
                h.len(),
                self.pairs
            )));
        }
        for trace in &self.traces {
            let k: Vec<i64> = trace.crossings.iter().map(|c| self.exponent(h, c.curve)).collect();
            if !trace.equation()?.is_solution(&k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parses `{"g": 2, "m": 1, "traces": [[{"t": "x1", "w": "X1", "curve": 1}], [{"w": "e"}]]}`.
    /// A piece without `t` may only open a trace and supplies its leading
    /// connector.
    pub fn from_json(text: &str) -> Result<Self, ExtensionError> {
        let doc: ExtensionDoc =
            serde_json::from_str(text).map_err(|e| ExtensionError::Instance(e.to_string()))?;
        let g = doc.g;
        let mut traces = Vec::with_capacity(doc.traces.len());
        for (r, pieces) in doc.traces.iter().enumerate() {
            let context = |j: usize, e: WordError| ExtensionError::Instance(format!("trace {r} piece {j}: {e}"));
            let mut lead = Word::empty(g);
            let mut crossings = Vec::new();
            for (j, piece) in pieces.iter().enumerate() {
                let w = Word::parse(g, &piece.w).map_err(|e| context(j, e))?;
                match (&piece.t, piece.curve) {
                    (None, None) if j == 0 => lead = w,
                    (None, None) => {
                        return Err(ExtensionError::Instance(format!(
                            "trace {r} piece {j}: only the first piece may omit t"
                        )))
                    }
                    (Some(t), Some(curve)) => {
                        let t = Word::parse(g, t).map_err(|e| context(j, e))?;
                        crossings.push(TwistCrossing::new(t, w, curve).map_err(|e| {
                            ExtensionError::Instance(format!("trace {r} piece {j}: {e}"))
                        })?);
                    }
                    _ => {
                        return Err(ExtensionError::Instance(format!(
                            "trace {r} piece {j}: t and curve must appear together"
                        )))
                    }
                }
            }
            traces.push(TwistTrace::new(lead, crossings));
        }
        Self::new(g, doc.m, traces)
    }

    pub fn to_json(&self) -> String {
        let doc = ExtensionDoc {
            g: self.rank,
            m: self.pairs,
            traces: self
                .traces
                .iter()
                .map(|trace| {
                    let lead = (!trace.lead.is_empty() || trace.crossings.is_empty()).then(|| PieceDoc {
                        t: None,
                        w: trace.lead.to_string(),
                        curve: None,
                    });
                    lead.into_iter()
                        .chain(trace.crossings.iter().map(|c| PieceDoc {
                            t: Some(c.t.to_string()),
                            w: c.w.to_string(),
                            curve: Some(c.curve),
                        }))
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("extension instances serialize")
    }
}

/// Some `h` making every meridian trivial, or `None` if there is none.
pub fn decide_extension(instance: &ExtensionInstance) -> Result<Option<Vec<BigInt>>, ExtensionError> {
    decide_extension_with(instance, NonZeroUsize::MIN, DEFAULT_BUDGET)
}

pub fn decide_extension_with(
    instance: &ExtensionInstance,
    jobs: NonZeroUsize,
    budget: u64,
) -> Result<Option<Vec<BigInt>>, ExtensionError> {
    let mut sets: Vec<SolutionSet> = Vec::with_capacity(instance.traces.len());
    for trace in &instance.traces {
        let set = solve_with(&trace.equation()?, jobs)?;
        if set.is_empty() {
            return Ok(None);
        }
        sets.push(set);
    }
    let mut choice = vec![0usize; sets.len()];
    loop {
        let components: Vec<&LinearSet> = sets.iter().zip(&choice).map(|(s, &c)| &s.components()[c]).collect();
        if let Some(h) = joint_witness(instance, &components, budget)? {
            return Ok(Some(h));
        }
        let Some(i) = (0..choice.len())
            .rev()
            .find(|&i| choice[i] + 1 < sets[i].components().len())
        else {
            return Ok(None);
        };
        choice[i] += 1;
        for c in &mut choice[i + 1..] {
            *c = 0;
        }
    }
}

/// Variables are `h₁ … h_m` (free) followed by the coefficient vectors of
/// each chosen component (nonnegative); every crossing exponent `z + M v`
/// must equal `±h`.
fn joint_witness(
    instance: &ExtensionInstance,
    components: &[&LinearSet],
    budget: u64,
) -> Result<Option<Vec<BigInt>>, ExtensionError> {
    let m = instance.pairs;
    let mut domains = vec![Domain::Free; m];
    let mut offsets = Vec::with_capacity(components.len());
    for c in components {
        offsets.push(domains.len());
        domains.extend(std::iter::repeat(Domain::NonNegative).take(c.dimension()));
    }
    let width = domains.len();
    let mut system = LinearSystem::new(domains);
    for ((trace, c), &offset) in instance.traces.iter().zip(components).zip(&offsets) {
        for (j, crossing) in trace.crossings.iter().enumerate() {
            let mut row = vec![BigInt::from(0); width];
            for (d, column) in c.generators().iter().enumerate() {
                row[offset + d] = column[j].clone();
            }
            if crossing.curve <= m {
                row[crossing.curve - 1] -= 1;
            } else {
                row[crossing.curve - m - 1] += 1;
            }
            system.add_equation(row, -c.base()[j].clone())?;
        }
    }
    Ok(system
        .feasible_with_budget(budget)?
        .map(|x| x[..m].to_vec()))
}

/// First `h ∈ [−bound, bound]^m` in lexicographic order that works.
pub fn brute_extension(instance: &ExtensionInstance, bound: i64) -> Result<Option<Vec<i64>>, ExtensionError> {
    let m = instance.pairs;
    let mut h = vec![-bound; m];
    loop {
        if instance.is_witness(&h)? {
            return Ok(Some(h));
        }
        let Some(i) = (0..m).rev().find(|&i| h[i] < bound) else {
            return Ok(None);
        };
        h[i] += 1;
        for v in &mut h[i + 1..] {
            *v = -bound;
        }
    }
}
