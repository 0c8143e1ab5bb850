use num_bigint::BigInt;

use super::classes::UnbundlingClass;
use super::labels::{BandKind, Label, LabelledBundle};
use super::{EquationInstance, SolveError};
use crate::bands::Band;
use crate::lattice::LinearSet;
use crate::word::Word;

/// The set of fiber widths for which one band cancels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Progression {
    Empty,
    Singleton(usize),
    /// `{start + step · v : v ≥ 0}`.
    Arithmetic { start: usize, step: usize },
}

/// Letters `h + 1 ..= h + width` of the block holding `position`.
fn segment(
    instance: &EquationInstance,
    bundle: &LabelledBundle,
    position: usize,
    offset: usize,
    width: usize,
) -> Word {
    match bundle.label(position) {
        Label::Constant(i) => instance.words()[i].subword(offset + 1, width),
        Label::Power(i) => instance.periods()[i]
            .power_subword(offset + 1, width)
            .expect("periods are nonempty"),
    }
}

fn cancels(instance: &EquationInstance, bundle: &LabelledBundle, band: Band, left: usize, right: usize, width: usize) -> bool {
    let (a, b) = band;
    segment(instance, bundle, a, left, width) == segment(instance, bundle, b, right, width).inverse()
}

/// Widths `s` for which the fibers of `band` cancel under `class`.
pub fn progression(
    instance: &EquationInstance,
    bundle: &LabelledBundle,
    class: &UnbundlingClass,
    band: Band,
) -> Progression {
    let (a, b) = band;
    let (ha, hb) = (class.offset(a), class.offset(b));
    match bundle.kind(band) {
        BandKind::Anchored => {
            let width = class.value(a).representative();
            if cancels(instance, bundle, band, ha, hb, width) {
                Progression::Singleton(width)
            } else {
                Progression::Empty
            }
        }
        BandKind::Floating => {
            let f = class
                .floating()
                .iter()
                .find(|f| f.band == band)
                .expect("floating bands carry CRT data");
            if !cancels(instance, bundle, band, ha, hb, f.start) {
                return Progression::Empty;
            }
            // one more period on both sides: the new left prefix must cancel
            // the new right suffix
            let extra_left = segment(instance, bundle, a, ha, f.step);
            let extra_right = segment(instance, bundle, b, hb + f.start, f.step);
            if extra_left == extra_right.inverse() {
                Progression::Arithmetic {
                    start: f.start,
                    step: f.step,
                }
            } else {
                Progression::Singleton(f.start)
            }
        }
    }
}

/// Turns the band progressions of one class into the linear set of
/// exponent vectors it yields. Returns `Ok(None)` when some band cannot
/// cancel.
pub fn assemble(
    instance: &EquationInstance,
    bundle: &LabelledBundle,
    class: &UnbundlingClass,
) -> Result<Option<LinearSet>, SolveError> {
    let l = instance.arity();
    let periods: Vec<usize> = instance.periods().iter().map(Word::len).collect();
    let mut sums = vec![0usize; l];
    let mut columns = Vec::new();
    let mut width = vec![0usize; bundle.length() + 1];
    for &band in bundle.bands() {
        let (start, step) = match progression(instance, bundle, class, band) {
            Progression::Empty => return Ok(None),
            Progression::Singleton(q) => (q, None),
            Progression::Arithmetic { start, step } => (start, Some(step)),
        };
        width[band.0] = start;
        width[band.1] = start;
        if let Some(step) = step {
            let mut column = vec![BigInt::from(0); l];
            for p in [band.0, band.1] {
                if let Label::Power(i) = bundle.label(p) {
                    column[i] += BigInt::from(exact_div(step, periods[i])?);
                }
            }
            columns.push(column);
        }
    }
    for (p, &w) in width.iter().enumerate().skip(1) {
        if let Label::Power(i) = bundle.label(p) {
            sums[i] += w;
        }
    }
    let base = sums
        .iter()
        .zip(&periods)
        .map(|(&s, &m)| exact_div(s, m).map(BigInt::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(LinearSet::new(base, columns)?))
}

fn exact_div(value: usize, modulus: usize) -> Result<usize, SolveError> {
    if value % modulus != 0 {
        return Err(SolveError::Divisibility { value, modulus });
    }
    Ok(value / modulus)
}
