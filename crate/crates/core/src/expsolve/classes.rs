use num_integer::Integer;

use super::labels::{BandKind, Label, LabelledBundle};
use super::EquationInstance;
use crate::bands::Band;
use crate::word::Word;

/// Fiber width data for one bundled position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassValue {
    /// The width is this exact positive integer.
    Exact(usize),
    /// The width is congruent to `residue` (taken in `1..=modulus`).
    Residue { residue: usize, modulus: usize },
}

impl ClassValue {
    /// The representative used for offsets: the exact width or the residue.
    pub fn representative(self) -> usize {
        match self {
            ClassValue::Exact(v) => v,
            ClassValue::Residue { residue, .. } => residue,
        }
    }
}

/// A band between two power blocks together with the smallest width `start`
/// in `1..=step` compatible with both endpoint residues, `step` being the
/// lcm of the two periods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FloatingBand {
    pub band: Band,
    pub start: usize,
    pub step: usize,
}

/// An equivalence class of unbundling maps compatible with the labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnbundlingClass {
    values: Vec<ClassValue>,
    offsets: Vec<usize>,
    floating: Vec<FloatingBand>,
}

impl UnbundlingClass {
    pub fn values(&self) -> &[ClassValue] {
        &self.values
    }

    /// Value at a 1-based position.
    pub fn value(&self, position: usize) -> ClassValue {
        self.values[position - 1]
    }

    /// `h(a')`: for constant positions the exact number of letters of the
    /// block before the fiber of `a'`, for power positions that number
    /// reduced into `0..|t_i|`.
    pub fn offset(&self, position: usize) -> usize {
        self.offsets[position - 1]
    }

    pub fn floating(&self) -> &[FloatingBand] {
        &self.floating
    }
}

/// Compositions of `total` into `parts` positive integers, in lexicographic
/// order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if total < parts {
            return;
        }
        for first in 1..=total - (parts - 1) {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Solves `s ≡ r₁ (mod m₁)`, `s ≡ r₂ (mod m₂)` with `s` in `1..=lcm`.
pub fn crt(r1: usize, m1: usize, r2: usize, m2: usize) -> Option<(usize, usize)> {
    let step = m1.lcm(&m2);
    let g = m1.gcd(&m2);
    if r1 % g != r2 % g {
        return None;
    }
    (1..=step)
        .step_by(m1)
        .map(|s| s + (r1 + m1 - 1) % m1)
        .find(|s| s % m2 == r2 % m2)
        .map(|s| (s, step))
}

/// Every unbundling class of `bundle` compatible with constant words of
/// lengths `word_lengths` and periods of lengths `period_lengths`, in a
/// fixed order.
pub fn enumerate_classes(
    bundle: &LabelledBundle,
    word_lengths: &[usize],
    period_lengths: &[usize],
) -> Vec<UnbundlingClass> {
    Search::new(bundle, word_lengths.to_vec(), period_lengths.to_vec(), None).run()
}

/// The classes of [`enumerate_classes`] for the words of `instance` in
/// which every band cancels at its smallest admissible width. Bands are
/// checked as soon as both fibers are placed, which prunes most of the
/// search.
pub fn cancelling_classes(instance: &EquationInstance, bundle: &LabelledBundle) -> Vec<UnbundlingClass> {
    let words = instance.words().iter().map(Word::len).collect();
    let periods = instance.periods().iter().map(Word::len).collect();
    Search::new(bundle, words, periods, Some(instance)).run()
}

/// Depth-first assignment of widths to positions from left to right. A
/// position whose partner lies to its left inherits the partner's width;
/// otherwise the width (or, for floating bands, the CRT start) is chosen.
struct Search<'a> {
    bundle: &'a LabelledBundle,
    instance: Option<&'a EquationInstance>,
    word_lengths: Vec<usize>,
    period_lengths: Vec<usize>,
    /// Positions of each constant block after a given position, inclusive.
    block_tail: Vec<usize>,
    values: Vec<ClassValue>,
    offsets: Vec<usize>,
    starts: Vec<usize>,
    running: usize,
    out: Vec<UnbundlingClass>,
}

impl<'a> Search<'a> {
    fn new(
        bundle: &'a LabelledBundle,
        word_lengths: Vec<usize>,
        period_lengths: Vec<usize>,
        instance: Option<&'a EquationInstance>,
    ) -> Self {
        let length = bundle.length();
        let mut block_tail = vec![0; length + 2];
        for p in (1..=length).rev() {
            let same = p < length && bundle.label(p + 1) == bundle.label(p);
            block_tail[p] = 1 + if same { block_tail[p + 1] } else { 0 };
        }
        Self {
            bundle,
            instance,
            word_lengths,
            period_lengths,
            block_tail,
            values: vec![ClassValue::Exact(0); length],
            offsets: vec![0; length],
            starts: vec![0; length + 1],
            running: 0,
            out: Vec::new(),
        }
    }

    fn run(mut self) -> Vec<UnbundlingClass> {
        if self.word_lengths.iter().enumerate().all(|(i, &len)| {
            let n = self.bundle.positions(Label::Constant(i)).count();
            (n == 0) == (len == 0) && n <= len
        }) {
            self.place(1);
        }
        self.out
    }

    fn partner(&self, p: usize) -> usize {
        self.bundle.bundle().system().partner(p)
    }

    /// Largest width any fiber of constant block `i` can take.
    fn widest(&self, i: usize) -> usize {
        let n = self.bundle.positions(Label::Constant(i)).count();
        self.word_lengths[i] + 1 - n
    }

    fn place(&mut self, p: usize) {
        if p > self.bundle.length() {
            let floating = self
                .bundle
                .bands()
                .iter()
                .filter(|&&band| self.bundle.kind(band) == BandKind::Floating)
                .map(|&(a, b)| FloatingBand {
                    band: (a, b),
                    start: self.starts[a],
                    step: self.modulus(a).lcm(&self.modulus(b)),
                })
                .collect();
            self.out.push(UnbundlingClass {
                values: self.values.clone(),
                offsets: self.offsets.clone(),
                floating,
            });
            return;
        }
        let label = self.bundle.label(p);
        let first = p == 1 || self.bundle.label(p - 1) != label;
        let saved = self.running;
        if first {
            self.running = 0;
        }
        self.offsets[p - 1] = self.running;
        let q = self.partner(p);
        let kind = self.bundle.kind((p.min(q), p.max(q)));
        if q < p {
            let value = match kind {
                BandKind::Anchored => self.values[q - 1],
                BandKind::Floating => self.residue(p, self.starts[q]),
            };
            if self.fits(p, value) && self.band_cancels(q, p) {
                self.descend(p, value);
            }
        } else {
            match (label, kind) {
                (_, BandKind::Floating) => {
                    let step = self.modulus(p).lcm(&self.modulus(q));
                    for start in 1..=step {
                        self.starts[p] = start;
                        let value = self.residue(p, start);
                        if self.fits(p, value) {
                            self.descend(p, value);
                        }
                    }
                }
                (Label::Constant(i), _) => {
                    let used = self.running;
                    let room = self.word_lengths[i] - used - (self.block_tail[p] - 1);
                    let widths = if self.block_tail[p] == 1 { room..=room } else { 1..=room };
                    for width in widths {
                        self.descend(p, ClassValue::Exact(width));
                    }
                }
                (Label::Power(_), _) => {
                    let Label::Constant(j) = self.bundle.label(q) else {
                        unreachable!("anchored bands touch a constant block")
                    };
                    for width in 1..=self.widest(j) {
                        let value = ClassValue::Exact(width);
                        if self.fits(p, value) {
                            self.descend(p, value);
                        }
                    }
                }
            }
        }
        self.running = saved;
    }

    fn descend(&mut self, p: usize, value: ClassValue) {
        self.values[p - 1] = value;
        let before = self.running;
        self.running += value.representative();
        if let Label::Power(i) = self.bundle.label(p) {
            self.running %= self.period_lengths[i];
        }
        self.place(p + 1);
        self.running = before;
    }

    fn modulus(&self, p: usize) -> usize {
        match self.bundle.label(p) {
            Label::Power(i) => self.period_lengths[i],
            Label::Constant(_) => unreachable!("floating bands join power blocks"),
        }
    }

    fn residue(&self, p: usize, start: usize) -> ClassValue {
        let modulus = self.modulus(p);
        ClassValue::Residue {
            residue: (start - 1) % modulus + 1,
            modulus,
        }
    }

    /// Block-level constraints for giving `p` the width `value`: constant
    /// blocks must be filled exactly, power blocks must close on a
    /// multiple of the period.
    fn fits(&self, p: usize, value: ClassValue) -> bool {
        let width = value.representative();
        let last = self.block_tail[p] == 1;
        match self.bundle.label(p) {
            Label::Constant(i) => {
                let total = self.running + width;
                let needed = self.block_tail[p] - 1;
                if last {
                    total == self.word_lengths[i]
                } else {
                    total + needed <= self.word_lengths[i]
                }
            }
            Label::Power(i) => !last || (self.running + width) % self.period_lengths[i] == 0,
        }
    }

    /// Whether the fibers of band `(a, b)` cancel at their smallest width.
    /// Always true when no instance was supplied.
    fn band_cancels(&self, a: usize, b: usize) -> bool {
        let Some(instance) = self.instance else {
            return true;
        };
        let width = match self.bundle.kind((a, b)) {
            BandKind::Anchored => self.values[a - 1].representative(),
            BandKind::Floating => self.starts[a],
        };
        let (ha, hb) = (self.offsets[a - 1], self.offsets[b - 1]);
        let letter = |p: usize, offset: usize| match self.bundle.label(p) {
            Label::Constant(i) => instance.words()[i].symbols()[offset],
            Label::Power(i) => {
                let t = instance.periods()[i].symbols();
                t[offset % t.len()]
            }
        };
        (0..width).all(|k| letter(a, ha + k) == -letter(b, hb + width - 1 - k))
    }
}
