use std::fmt;

use super::SolveError;
use crate::bands::{Band, BandSystem, MarkedBandSystem};

/// Which block of `w(k)` a bundled position comes from. Indices are 0-based:
/// `Constant(i)` is `w_i`, `Power(i)` is the block `t_{i+1}^{k_{i+1}}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Constant(usize),
    Power(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Constant(i) => write!(f, "W{i}"),
            Label::Power(i) => write!(f, "T{}", i + 1),
        }
    }
}

/// Bands touching a constant block have a fixed width; bands joining two
/// power blocks may stretch by multiples of the periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandKind {
    Anchored,
    Floating,
}

/// A maximal marked band system with `2l + 2` boundary-anchored marks,
/// with each position labelled by its block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledBundle {
    bundle: MarkedBandSystem,
    labels: Vec<Label>,
    arity: usize,
}

impl LabelledBundle {
    pub fn bundle(&self) -> &MarkedBandSystem {
        &self.bundle
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Label of a 1-based position.
    pub fn label(&self, position: usize) -> Label {
        self.labels[position - 1]
    }

    pub fn bands(&self) -> &[Band] {
        self.bundle.system().bands()
    }

    pub fn length(&self) -> usize {
        self.labels.len()
    }

    pub fn kind(&self, band: Band) -> BandKind {
        match (self.label(band.0), self.label(band.1)) {
            (Label::Power(_), Label::Power(_)) => BandKind::Floating,
            _ => BandKind::Anchored,
        }
    }

    /// Positions carrying `label`, ascending.
    pub fn positions(&self, label: Label) -> impl Iterator<Item = usize> + '_ {
        (1..=self.length()).filter(move |&p| self.label(p) == label)
    }
}

/// Labels positions by the block between consecutive marks: the stretch
/// after mark `2i` is `W_i`, after mark `2i + 1` is `T_{i+1}` (0-based mark
/// indices). Returns `None` when the bundle cannot be a cancellation bundle
/// for cyclically reduced periods: some band has both ends in one power
/// block, or two bands join the same pair of power blocks.
pub fn label_bundle(bundle: &MarkedBandSystem, arity: usize) -> Result<Option<LabelledBundle>, SolveError> {
    let marks = bundle.marks();
    if marks.len() != 2 * arity + 2 {
        return Err(SolveError::Bundle(format!(
            "expected {} marks for arity {arity}, got {}",
            2 * arity + 2,
            marks.len()
        )));
    }
    let length = bundle.length();
    if marks[0] != 0 || marks[marks.len() - 1] != length {
        return Err(SolveError::Bundle(format!(
            "marks must start at gap 0 and end at gap {length}"
        )));
    }
    let mut labels = Vec::with_capacity(length);
    for block in 0..marks.len() - 1 {
        let label = if block % 2 == 0 {
            Label::Constant(block / 2)
        } else {
            Label::Power(block / 2)
        };
        labels.extend(std::iter::repeat(label).take(marks[block + 1] - marks[block]));
    }
    let mut joined = vec![false; arity * arity];
    for &(a, b) in bundle.system().bands() {
        if let (Label::Power(i), Label::Power(j)) = (labels[a - 1], labels[b - 1]) {
            if i == j || joined[i * arity + j] {
                return Ok(None);
            }
            joined[i * arity + j] = true;
        }
    }
    Ok(Some(LabelledBundle {
        bundle: bundle.clone(),
        labels,
        arity,
    }))
}

/// Every labelled bundle of length at most `bound` that can arise as the
/// cancellation bundle of an instance whose constant words have the given
/// lengths (`word_lengths[i] = |w_i|`), sorted by length, band list and marks.
///
/// Equivalent to filtering all maximal marked systems through
/// [`label_bundle`] and discarding those whose `W_i` block could not hold
/// `|w_i|` letters, but built block layout by block layout so that only
/// admissible matchings are ever generated.
pub fn labelled_bundles(word_lengths: &[usize], bound: usize) -> Vec<LabelledBundle> {
    let arity = word_lengths.len().saturating_sub(1);
    let constant_ranges: Vec<(usize, usize)> = word_lengths
        .iter()
        .map(|&len| if len == 0 { (0, 0) } else { (1, len) })
        .collect();
    let mut out = Vec::new();
    let mut constant = constant_ranges.iter().map(|r| r.0).collect::<Vec<_>>();
    loop {
        let constant_total: usize = constant.iter().sum();
        // every power position is matched to a constant position or is one
        // of at most two endpoints per pair of power blocks
        let power_cap = (constant_total + arity * arity.saturating_sub(1))
            .min(bound.saturating_sub(constant_total));
        if constant_total <= bound {
            let mut power = vec![0usize; arity];
            loop {
                let total = constant_total + power.iter().sum::<usize>();
                if total % 2 == 0 {
                    generate(&constant, &power, &mut out);
                }
                if !next_bounded_tuple(&mut power, power_cap) {
                    break;
                }
            }
        }
        let Some(i) = (0..constant.len())
            .rev()
            .find(|&i| constant[i] < constant_ranges[i].1)
        else {
            break;
        };
        constant[i] += 1;
        for j in i + 1..constant.len() {
            constant[j] = constant_ranges[j].0;
        }
    }
    out.sort_by(|a, b| {
        (a.length(), a.bands(), a.bundle.marks()).cmp(&(b.length(), b.bands(), b.bundle.marks()))
    });
    out
}

/// Next tuple with entry sum at most `cap`, in lexicographic order.
fn next_bounded_tuple(tuple: &mut [usize], cap: usize) -> bool {
    let sum: usize = tuple.iter().sum();
    if let Some(last) = tuple.last_mut() {
        if sum < cap {
            *last += 1;
            return true;
        }
    }
    for i in (0..tuple.len().saturating_sub(1)).rev() {
        let prefix: usize = tuple[..=i].iter().sum();
        if prefix < cap {
            tuple[i] += 1;
            for v in &mut tuple[i + 1..] {
                *v = 0;
            }
            return true;
        }
    }
    false
}

struct Layout {
    labels: Vec<Label>,
    marked: Vec<bool>,
    arity: usize,
    partner: Vec<usize>,
    joined: Vec<bool>,
    stack: Vec<usize>,
}

fn generate(constant: &[usize], power: &[usize], out: &mut Vec<LabelledBundle>) {
    let arity = power.len();
    let mut marks = vec![0usize];
    let mut labels = Vec::new();
    for i in 0..=arity {
        labels.extend(std::iter::repeat(Label::Constant(i)).take(constant[i]));
        marks.push(labels.len());
        if i < arity {
            labels.extend(std::iter::repeat(Label::Power(i)).take(power[i]));
            marks.push(labels.len());
        }
    }
    let length = labels.len();
    let mut marked = vec![false; length + 1];
    for &m in &marks {
        marked[m] = true;
    }
    let mut layout = Layout {
        labels,
        marked,
        arity,
        partner: vec![0; length + 1],
        joined: vec![false; arity * arity],
        stack: Vec::new(),
    };
    layout.extend(1, &marks, out);
}

impl Layout {
    fn extend(&mut self, position: usize, marks: &[usize], out: &mut Vec<LabelledBundle>) {
        let length = self.labels.len();
        if position > length {
            let bands: Vec<Band> = (1..=length)
                .filter(|&a| self.partner[a] > a)
                .map(|a| (a, self.partner[a]))
                .collect();
            let system = BandSystem::validate(&bands).expect("generated matchings are non-crossing");
            let bundle = MarkedBandSystem::new(system, marks.to_vec()).expect("layout marks are valid");
            out.push(LabelledBundle {
                bundle,
                labels: self.labels.clone(),
                arity: self.arity,
            });
            return;
        }
        if let Some(&open) = self.stack.last() {
            if let Some(pair) = self.admissible(open, position) {
                self.stack.pop();
                self.partner[open] = position;
                self.partner[position] = open;
                if let Some(p) = pair {
                    self.joined[p] = true;
                }
                self.extend(position + 1, marks, out);
                if let Some(p) = pair {
                    self.joined[p] = false;
                }
                self.partner[open] = 0;
                self.partner[position] = 0;
                self.stack.push(open);
            }
        }
        if self.stack.len() < length - position {
            self.stack.push(position);
            self.extend(position + 1, marks, out);
            self.stack.pop();
        }
    }

    /// Whether band `(a, b)` may be closed; the inner `Option` names the
    /// pair of power blocks it joins.
    fn admissible(&self, a: usize, b: usize) -> Option<Option<usize>> {
        if b - a >= 3 && self.partner[a + 1] == b - 1 && !self.marked[a] && !self.marked[b - 1] {
            return None;
        }
        match (self.labels[a - 1], self.labels[b - 1]) {
            (Label::Power(i), Label::Power(j)) => {
                let pair = i * self.arity + j;
                if i == j || self.joined[pair] {
                    None
                } else {
                    Some(Some(pair))
                }
            }
            _ => Some(None),
        }
    }
}
