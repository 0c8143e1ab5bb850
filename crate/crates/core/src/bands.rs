//! Band systems: non-crossing perfect matchings on `{1, …, 2n}`, optionally
//! marked with separators, together with the bundling machinery that merges
//! runs of nested parallel bands.
//!
//! Marks are stored as gap indices: the value `m` denotes the separator
//! between positions `m` and `m + 1` (that is, the half-integer `m + 1/2`).
//! Gap `0` sits before the first position and gap `2n` after the last one.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::word::Word;

/// A band `(left, right)` with `left < right`, positions 1-based.
pub type Band = (usize, usize);

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BandError {
    #[error("band ({0}, {1}) does not have its left endpoint before its right endpoint")]
    Order(usize, usize),
    #[error("bands do not form a perfect matching of 1..={length}: position {position} is {problem}")]
    NotAMatching {
        length: usize,
        position: usize,
        problem: &'static str,
    },
    #[error("bands ({}, {}) and ({}, {}) cross", .0.0, .0.1, .1.0, .1.1)]
    Crossing(Band, Band),
    #[error("mark {mark} lies outside the gaps 0..={length}")]
    MarkOutOfRange { mark: usize, length: usize },
    #[error("marks must be weakly increasing")]
    MarksNotIncreasing,
    #[error("({0}, {1}) is not a band of the system")]
    NotABand(usize, usize),
    #[error("no width-one band below ({0}, {1}); the system is inconsistent")]
    NoWidthOneBand(usize, usize),
    #[error("unbundling map has {got} values, expected {expected}")]
    UnbundlingLength { got: usize, expected: usize },
    #[error("unbundling map must be positive, got 0 at position {0}")]
    UnbundlingZero(usize),
    #[error("unbundling map differs on the endpoints of band ({0}, {1})")]
    UnbundlingNotConstant(usize, usize),
    #[error("word has length {word} but the band system has length {bands}")]
    LengthMismatch { word: usize, bands: usize },
    #[error("at least two marks are required, got {0}")]
    TooFewMarks(usize),
    #[error("cannot parse band system text: {0}")]
    Syntax(String),
}

/// A validated band system, bands sorted by left endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BandSystem {
    bands: Vec<Band>,
    /// `partner[p - 1]` is the other endpoint of the band through `p`.
    partner: Vec<usize>,
}

impl BandSystem {
    /// Checks the three band system conditions and returns the canonical
    /// (sorted) system.
    pub fn validate(pairs: &[Band]) -> Result<Self, BandError> {
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| a >= b) {
            return Err(BandError::Order(a, b));
        }
        let length = 2 * pairs.len();
        let mut partner = vec![0usize; length];
        for &(a, b) in pairs {
            for (p, q) in [(a, b), (b, a)] {
                if p == 0 || p > length {
                    return Err(BandError::NotAMatching {
                        length,
                        position: p,
                        problem: "out of range",
                    });
                }
                if partner[p - 1] != 0 {
                    return Err(BandError::NotAMatching {
                        length,
                        position: p,
                        problem: "used twice",
                    });
                }
                partner[p - 1] = q;
            }
        }
        // every slot is filled: 2n distinct endpoints in a range of size 2n
        let mut stack: Vec<usize> = Vec::new();
        for p in 1..=length {
            let q = partner[p - 1];
            if q > p {
                stack.push(p);
            } else {
                let top = stack.pop().expect("left endpoint precedes right");
                if top != q {
                    return Err(BandError::Crossing((q, p), (top, partner[top - 1])));
                }
            }
        }
        let mut bands = pairs.to_vec();
        bands.sort_unstable();
        Ok(Self { bands, partner })
    }

    pub fn empty() -> Self {
        Self {
            bands: Vec::new(),
            partner: Vec::new(),
        }
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Length `2n` of the underlying interval.
    pub fn length(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, position: usize) -> usize {
        self.partner[position - 1]
    }

    pub fn contains(&self, band: Band) -> bool {
        band.0 >= 1 && band.1 <= self.length() && band.0 < band.1 && self.partner(band.0) == band.1
    }

    /// Some band `(c, c + 1)` with `a ≤ c < b`: the narrowest band whose
    /// left endpoint lies in `[a, b)`.
    pub fn width_one_witness(&self, band: Band) -> Result<Band, BandError> {
        if !self.contains(band) {
            return Err(BandError::NotABand(band.0, band.1));
        }
        let (a, b) = band;
        let narrowest = (a..b)
            .filter(|&c| self.partner(c) > c)
            .map(|c| (c, self.partner(c)))
            .min_by_key(|&(c, d)| (d - c, c))
            .expect("the band itself qualifies");
        if narrowest.1 != narrowest.0 + 1 {
            return Err(BandError::NoWidthOneBand(a, b));
        }
        Ok(narrowest)
    }

    /// True when `w` has `w_a = w_b⁻¹` across every band.
    pub fn is_cancellation(&self, word: &Word) -> Result<bool, BandError> {
        if word.len() != self.length() {
            return Err(BandError::LengthMismatch {
                word: word.len(),
                bands: self.length(),
            });
        }
        Ok(self
            .bands
            .iter()
            .all(|&(a, b)| word.symbol(a) == -word.symbol(b)))
    }
}

/// Pairs each position with the one it cancels against under a left-to-right
/// stack reduction. Returns `None` when the word is not trivial.
pub fn extract_cancellation(word: &Word) -> Option<BandSystem> {
    let mut stack: Vec<usize> = Vec::new();
    let mut bands = Vec::with_capacity(word.len() / 2);
    for p in 1..=word.len() {
        match stack.last() {
            Some(&top) if word.symbol(top) == -word.symbol(p) => {
                stack.pop();
                bands.push((top, p));
            }
            _ => stack.push(p),
        }
    }
    if !stack.is_empty() {
        return None;
    }
    Some(BandSystem::validate(&bands).expect("stack pairing is non-crossing"))
}

/// A band system with a weakly increasing sequence of gap marks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedBandSystem {
    system: BandSystem,
    marks: Vec<usize>,
}

impl MarkedBandSystem {
    pub fn new(system: BandSystem, marks: Vec<usize>) -> Result<Self, BandError> {
        let length = system.length();
        if let Some(&mark) = marks.iter().find(|&&m| m > length) {
            return Err(BandError::MarkOutOfRange { mark, length });
        }
        if marks.windows(2).any(|w| w[0] > w[1]) {
            return Err(BandError::MarksNotIncreasing);
        }
        Ok(Self { system, marks })
    }

    pub fn system(&self) -> &BandSystem {
        &self.system
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn length(&self) -> usize {
        self.system.length()
    }

    fn gap_marked(&self) -> Vec<bool> {
        let mut marked = vec![false; self.length() + 1];
        for &m in &self.marks {
            marked[m] = true;
        }
        marked
    }

    /// Merges parallel bands `(a, b)`, `(a + 1, b - 1)` whenever neither gap
    /// `a` nor gap `b - 1` is marked, and returns the result with its
    /// bundling map.
    pub fn maximal_bundle(&self) -> (MarkedBandSystem, BundlingMap) {
        let length = self.length();
        let marked = self.gap_marked();
        // joined[g] is true when positions g and g + 1 share a class
        let mut joined = vec![false; length + 1];
        for &(a, b) in self.system.bands() {
            if b - a >= 3
                && self.system.partner(a + 1) == b - 1
                && !marked[a]
                && !marked[b - 1]
            {
                joined[a] = true;
                joined[b - 1] = true;
            }
        }
        let mut assignment = Vec::with_capacity(length);
        let mut class = 0;
        for p in 1..=length {
            if p == 1 || !joined[p - 1] {
                class += 1;
            }
            assignment.push(class);
        }
        let map = BundlingMap {
            target_length: class,
            assignment,
        };
        let mut bands: Vec<Band> = self
            .system
            .bands()
            .iter()
            .map(|&(a, b)| (map.image(a), map.image(b)))
            .collect();
        bands.dedup();
        let system = BandSystem::validate(&bands).expect("bundling preserves band systems");
        let marks = self
            .marks
            .iter()
            .map(|&m| if m == 0 { 0 } else { map.image(m) })
            .collect();
        let bundled = MarkedBandSystem::new(system, marks).expect("bundling preserves marks");
        (bundled, map)
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal_bundle().1.is_identity()
    }

    /// Replaces each band `(a', b')` by `φ(a')` nested parallel bands and
    /// moves each mark to the end of its fiber.
    pub fn unbundle(&self, phi: &UnbundlingMap) -> Result<MarkedBandSystem, BandError> {
        phi.check_against(&self.system)?;
        let cumulative = phi.cumulative();
        let mut bands = Vec::with_capacity(cumulative[self.length()] / 2);
        for &(a, b) in self.system.bands() {
            let width = phi.value(a);
            let left = cumulative[a - 1];
            let right = cumulative[b - 1];
            bands.extend((1..=width).map(|i| (left + i, right + width + 1 - i)));
        }
        let system = BandSystem::validate(&bands).expect("unbundling preserves band systems");
        let marks = self
            .marks
            .iter()
            .map(|&m| if m == 0 { 0 } else { cumulative[m] })
            .collect();
        Ok(MarkedBandSystem::new(system, marks).expect("unbundling preserves marks"))
    }
}

/// Surjective, weakly monotone map from positions of a system onto the
/// positions of its maximal bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundlingMap {
    target_length: usize,
    assignment: Vec<usize>,
}

impl BundlingMap {
    pub fn source_length(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_length(&self) -> usize {
        self.target_length
    }

    /// `ι(position)`, both 1-based.
    pub fn image(&self, position: usize) -> usize {
        self.assignment[position - 1]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn is_identity(&self) -> bool {
        self.target_length == self.assignment.len()
    }

    /// Fiber sizes `|ι⁻¹(a')|`, which form an unbundling map of the target.
    pub fn fiber_sizes(&self) -> UnbundlingMap {
        let mut values = vec![0usize; self.target_length];
        for &a in &self.assignment {
            values[a - 1] += 1;
        }
        UnbundlingMap { values }
    }
}

/// Positive fiber sizes `φ(a')` of an unbundling, constant across bands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnbundlingMap {
    values: Vec<usize>,
}

impl UnbundlingMap {
    pub fn new(values: Vec<usize>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, position: usize) -> usize {
        self.values[position - 1]
    }

    /// `φ̂(a') = φ(1) + … + φ(a' - 1)` for `a' ∈ 1..=2n' + 1`; entry `a' - 1`.
    pub fn cumulative(&self) -> Vec<usize> {
        let mut acc = Vec::with_capacity(self.values.len() + 1);
        let mut total = 0;
        acc.push(0);
        for &v in &self.values {
            total += v;
            acc.push(total);
        }
        acc
    }

    fn check_against(&self, system: &BandSystem) -> Result<(), BandError> {
        if self.values.len() != system.length() {
            return Err(BandError::UnbundlingLength {
                got: self.values.len(),
                expected: system.length(),
            });
        }
        if let Some(p) = self.values.iter().position(|&v| v == 0) {
            return Err(BandError::UnbundlingZero(p + 1));
        }
        if let Some(&(a, b)) = system
            .bands()
            .iter()
            .find(|&&(a, b)| self.value(a) != self.value(b))
        {
            return Err(BandError::UnbundlingNotConstant(a, b));
        }
        Ok(())
    }
}

/// Every non-crossing perfect matching of `1..=length`, sorted by band list.
pub fn non_crossing_matchings(length: usize) -> Vec<BandSystem> {
    fn build(lo: usize, hi: usize, memo: &mut HashMap<(usize, usize), Vec<Vec<Band>>>) -> Vec<Vec<Band>> {
        if lo > hi {
            return vec![Vec::new()];
        }
        if let Some(cached) = memo.get(&(lo, hi)) {
            return cached.clone();
        }
        let mut out = Vec::new();
        let mut partner = lo + 1;
        while partner <= hi {
            let inside = build(lo + 1, partner - 1, memo);
            let outside = build(partner + 1, hi, memo);
            for i in &inside {
                for o in &outside {
                    let mut bands = Vec::with_capacity(1 + i.len() + o.len());
                    bands.push((lo, partner));
                    bands.extend_from_slice(i);
                    bands.extend_from_slice(o);
                    out.push(bands);
                }
            }
            partner += 2;
        }
        memo.insert((lo, hi), out.clone());
        out
    }
    if length % 2 == 1 {
        return Vec::new();
    }
    let mut systems: Vec<BandSystem> = build(1, length, &mut HashMap::new())
        .into_iter()
        .map(|mut bands| {
            bands.sort_unstable();
            BandSystem::validate(&bands).expect("generated matchings are valid")
        })
        .collect();
    systems.sort();
    systems
}

type MaximalCache = Mutex<HashMap<(usize, usize), Arc<Vec<MarkedBandSystem>>>>;

/// All maximal marked band systems of exactly `length` positions with
/// `mark_count` marks, the first at gap 0 and the last at gap `length`.
/// Results are cached per `(length, mark_count)`.
pub fn maximal_marked_of_length(length: usize, mark_count: usize) -> Arc<Vec<MarkedBandSystem>> {
    static CACHE: OnceLock<MaximalCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(length, mark_count)) {
        return Arc::clone(hit);
    }
    let mut out = Vec::new();
    if mark_count >= 2 && length % 2 == 0 {
        let interior = mark_count - 2;
        for system in non_crossing_matchings(length) {
            let mut marks = vec![0usize; interior];
            loop {
                let mut full = Vec::with_capacity(mark_count);
                full.push(0);
                full.extend_from_slice(&marks);
                full.push(length);
                let marked = MarkedBandSystem::new(system.clone(), full).expect("marks in range");
                if marked.is_maximal() {
                    out.push(marked);
                }
                if !next_weakly_increasing(&mut marks, length) {
                    break;
                }
            }
        }
    }
    let out = Arc::new(out);
    cache
        .lock()
        .unwrap()
        .insert((length, mark_count), Arc::clone(&out));
    out
}

/// Advances `seq` to the next weakly increasing sequence over `0..=max` in
/// lexicographic order. Returns false after the last one.
fn next_weakly_increasing(seq: &mut [usize], max: usize) -> bool {
    let Some(i) = seq.iter().rposition(|&v| v < max) else {
        return false;
    };
    let next = seq[i] + 1;
    for v in &mut seq[i..] {
        *v = next;
    }
    true
}

/// Streams every maximal marked band system of even length up to
/// `max_length` with `mark_count` boundary-anchored marks, ordered by
/// length, then band list, then marks.
pub fn enumerate_maximal_marked(
    max_length: usize,
    mark_count: usize,
) -> Result<impl Iterator<Item = MarkedBandSystem>, BandError> {
    if mark_count < 2 {
        return Err(BandError::TooFewMarks(mark_count));
    }
    Ok((0..=max_length / 2).flat_map(move |n| {
        let systems = maximal_marked_of_length(2 * n, mark_count);
        (0..systems.len()).map(move |i| systems[i].clone())
    }))
}

impl fmt::Display for BandSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; bands=", self.bands.len())?;
        for (a, b) in &self.bands {
            write!(f, "({a},{b})")?;
        }
        f.write_str("; marks=")
    }
}

impl fmt::Display for MarkedBandSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.system)?;
        for (i, m) in self.marks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn syntax(msg: impl Into<String>) -> BandError {
    BandError::Syntax(msg.into())
}

fn parse_number(text: &str, what: &str) -> Result<usize, BandError> {
    let text = text.trim();
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(format!("expected a nonnegative integer for {what}, got {text:?}")));
    }
    text.parse()
        .map_err(|_| syntax(format!("{what} value {text:?} is out of range")))
}

/// Text format `n=<N>; bands=(a1,b1)(a2,b2)...; marks=m1,m2,...`, where `N`
/// is the number of bands. The `marks` field may be omitted or empty.
impl FromStr for MarkedBandSystem {
    type Err = BandError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut n = None;
        let mut bands = None;
        let mut marks = Vec::new();
        for field in text.trim().split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| syntax(format!("field {field:?} is not key=value")))?;
            match key.trim() {
                "n" => n = Some(parse_number(value, "n")?),
                "bands" => bands = Some(parse_bands(value)?),
                "marks" => {
                    marks = value
                        .split(',')
                        .map(str::trim)
                        .filter(|m| !m.is_empty())
                        .map(|m| parse_number(m, "mark"))
                        .collect::<Result<_, _>>()?
                }
                other => return Err(syntax(format!("unknown field {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| syntax("missing field n"))?;
        let bands = bands.ok_or_else(|| syntax("missing field bands"))?;
        if bands.len() != n {
            return Err(syntax(format!("n={n} but {} bands were listed", bands.len())));
        }
        MarkedBandSystem::new(BandSystem::validate(&bands)?, marks)
    }
}

fn parse_bands(text: &str) -> Result<Vec<Band>, BandError> {
    let mut rest = text.trim();
    let mut bands = Vec::new();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| syntax(format!("expected '(' at {rest:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| syntax("unterminated band"))?;
        let (a, b) = body[..close]
            .split_once(',')
            .ok_or_else(|| syntax(format!("band {:?} needs two endpoints", &body[..close])))?;
        bands.push((parse_number(a, "endpoint")?, parse_number(b, "endpoint")?));
        rest = body[close + 1..].trim_start();
    }
    Ok(bands)
}
