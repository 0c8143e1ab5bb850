//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion reports one PASS/FAIL line.

use std::collections::HashMap;
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use freeexp::bands::{non_crossing_matchings, BandSystem, MarkedBandSystem};
use freeexp::expsolve::{normalize, solve, EquationInstance, LabelledBundle, SolveContext};
use freeexp::lattice::{Domain, LinearSystem};
use freeexp::twist::{brute_extension, decide_extension, ExtensionInstance, TwistCrossing, TwistTrace};
use freeexp::word::Word;
use num_bigint::BigInt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| i64::try_from(x).ok()).collect()
}

fn random_word(rng: &mut ChaCha8Rng, rank: u32, len: usize) -> Word {
    let symbols = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=rank as i32);
            if rng.gen_bool(0.5) { g } else { -g }
        })
        .collect();
    Word::new(rank, symbols).unwrap()
}

/// Splits `total` letters over `parts` constant words.
fn random_split(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![0; parts];
    for _ in 0..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

/// Instances with `g ≤ 2`, `l ≤ 2`, `|t_i| ≤ 3`, `Σ|w_i| ≤ 4`. Every other
/// instance is planted: the last constant is chosen to close up a random
/// exponent vector, and the draw is retried until the length budget holds.
fn random_instance(rng: &mut ChaCha8Rng, planted: bool) -> EquationInstance {
    loop {
        let rank = rng.gen_range(1..=2);
        let l = rng.gen_range(0..=2);
        let periods: Vec<Word> = (0..l)
            .map(|_| {
                let len = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=3) };
                random_word(rng, rank, len)
            })
            .collect();
        let total = rng.gen_range(0..=4);
        let split = random_split(rng, total, l + 1);
        let mut words: Vec<Word> = split.iter().map(|&n| random_word(rng, rank, n)).collect();
        if planted {
            let k: Vec<i64> = (0..l).map(|_| rng.gen_range(-3..=3)).collect();
            words[l] = Word::empty(rank);
            let probe = EquationInstance::new(rank, words.clone(), periods.clone()).unwrap();
            words[l] = probe.instantiate(&k).unwrap().reduce().inverse();
        }
        let instance = EquationInstance::new(rank, words, periods).unwrap();
        if instance.constant_length() <= 4 {
            return instance;
        }
    }
}

fn box_points(l: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut k = vec![-radius; l];
    loop {
        out.push(k.clone());
        let Some(i) = (0..l).rev().find(|&i| k[i] < radius) else {
            return out;
        };
        k[i] += 1;
        for v in &mut k[i + 1..] {
            *v = -radius;
        }
    }
}

fn band_goldens() -> Outcome {
    let start = Instant::now();
    let parse = |s: &str| s.parse::<MarkedBandSystem>().unwrap();
    let top = parse("n=6; bands=(1,12)(2,11)(3,8)(4,7)(5,6)(9,10); marks=2,6,9,12");
    let (bundle, _) = top.maximal_bundle();
    if bundle != parse("n=4; bands=(1,8)(2,5)(3,4)(6,7); marks=1,4,6,8") {
        return Err(format!("maximal bundle was {bundle}"));
    }
    let small = parse("n=2; bands=(1,4)(2,3); marks=1");
    let unbundled = small
        .unbundle(&freeexp::bands::UnbundlingMap::new(vec![4, 2, 2, 4]))
        .map_err(|e| e.to_string())?;
    if unbundled != parse("n=6; bands=(1,12)(2,11)(3,10)(4,9)(5,8)(6,7); marks=4") {
        return Err(format!("unbundling was {unbundled}"));
    }
    let word = Word::parse(2, "x2 X2 x2 X1 x1 X2 x1 x2 X2 X1").unwrap();
    let system = BandSystem::validate(&[(1, 6), (2, 3), (4, 5), (7, 10), (8, 9)]).unwrap();
    if !system.is_cancellation(&word).unwrap() {
        return Err("cancellation band system rejected".into());
    }
    within(start, Duration::from_secs(1))?;
    Ok("maximal bundle, unbundling and cancellation goldens reproduced".into())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:?}, limit {limit:?}"));
    }
    Ok(())
}

struct Differential {
    pairs: usize,
    components: usize,
    samples: usize,
    bundles_checked: usize,
    failures: [Vec<String>; 3],
}

/// Criteria 2, 3 and 4 share the same 200 instances.
fn differential() -> Differential {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut report = Differential {
        pairs: 0,
        components: 0,
        samples: 0,
        bundles_checked: 0,
        failures: Default::default(),
    };
    for n in 0..200 {
        let instance = random_instance(&mut rng, n % 2 == 0);
        let label = instance.to_json();
        let set = match solve(&instance) {
            Ok(s) => s,
            Err(e) => {
                report.failures[0].push(format!("{label}: {e}"));
                continue;
            }
        };

        let l = instance.arity();
        let oracle = instance.brute_force(4).unwrap();
        for k in box_points(l, 4) {
            report.pairs += 1;
            let member = set.member(&big(&k)).unwrap();
            if member != oracle.contains(&k) {
                report.failures[0].push(format!("{label} at {k:?}: solver says {member}"));
            }
        }

        for component in set.components() {
            report.components += 1;
            for _ in 0..50 {
                let v: Vec<BigInt> = (0..component.dimension())
                    .map(|_| BigInt::from(rng.gen_range(0..=5)))
                    .collect();
                let k = small(&component.point(&v)).unwrap();
                report.samples += 1;
                if !instance.is_solution(&k).unwrap() {
                    report.failures[1].push(format!("{label}: sampled {k:?} is not a solution"));
                }
            }
        }

        let normalized = normalize(&instance).unwrap();
        let mut bundles: HashMap<Vec<i8>, (SolveContext, Vec<LabelledBundle>)> = HashMap::new();
        for k in &oracle {
            let reduced: Vec<i64> = normalized.kept().iter().map(|&i| k[i]).collect();
            let (ctx, abs) = SolveContext::containing(normalized.instance(), &reduced).unwrap();
            let (ctx, enumerated) = bundles
                .entry(ctx.signs().to_vec())
                .or_insert_with(|| {
                    let list = ctx.bundles();
                    (ctx, list)
                });
            report.bundles_checked += 1;
            let bundle = ctx.cancellation_bundle(&abs).unwrap();
            let Some(bundle) = bundle else {
                report.failures[2].push(format!("{label} at {k:?}: no cancellation system"));
                continue;
            };
            if bundle.length() > ctx.bound() {
                report.failures[2].push(format!(
                    "{label} at {k:?}: bundle length {} exceeds {}",
                    bundle.length(),
                    ctx.bound()
                ));
                continue;
            }
            let Some(found) = enumerated.iter().find(|b| b.bundle() == &bundle) else {
                report.failures[2].push(format!("{label} at {k:?}: bundle {bundle} not enumerated"));
                continue;
            };
            let covers = ctx
                .solve_bundle(found)
                .unwrap()
                .iter()
                .any(|c| c.contains(&big(&abs), 1_000_000).unwrap());
            if !covers {
                report.failures[2].push(format!("{label} at {k:?}: bundle {bundle} misses k"));
            }
        }
    }
    report
}

fn verdict(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Ok(summary),
        Some(first) => Err(format!("{} failures, first: {first}", failures.len())),
    }
}

fn band_identities() -> Outcome {
    let start = Instant::now();
    // independent recursive count: the first position pairs with some
    // position splitting the rest into two even stretches
    fn count(n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (0..n).map(|i| count(i) * count(n - 1 - i)).sum()
    }
    for n in 1..=4 {
        let systems = non_crossing_matchings(2 * n);
        if systems.len() != count(n) || count(n) != [1, 2, 5, 14][n - 1] {
            return Err(format!("{} matchings of length {}", systems.len(), 2 * n));
        }
        for s in &systems {
            for &band in s.bands() {
                let (a, b) = s.width_one_witness(band).map_err(|e| format!("{s}: {e}"))?;
                if b != a + 1 || a < band.0 || b > band.1 {
                    return Err(format!("{s}: bad witness ({a},{b}) for {band:?}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let pools: Vec<Vec<BandSystem>> = (0..=6).map(|n| non_crossing_matchings(2 * n)).collect();
    for _ in 0..100 {
        let n = rng.gen_range(0..=6);
        let system = pools[n].choose(&mut rng).unwrap().clone();
        let mut marks: Vec<usize> = (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..=2 * n)).collect();
        marks.sort_unstable();
        let marked = MarkedBandSystem::new(system, marks).unwrap();
        let (bundle, map) = marked.maximal_bundle();
        if !bundle.is_maximal() || bundle.maximal_bundle().0 != bundle {
            return Err(format!("bundling {marked} is not idempotent"));
        }
        let back = bundle.unbundle(&map.fiber_sizes()).map_err(|e| e.to_string())?;
        if back != marked {
            return Err(format!("{marked} round-tripped to {back}"));
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok("Catalan counts 1, 2, 5, 14; width-one witnesses; 100 bundle round trips".into())
}

fn feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut agreed = 0;
    for _ in 0..200 {
        let vars = rng.gen_range(1..=4);
        let eqs = rng.gen_range(1..=3);
        let domains: Vec<Domain> = (0..vars)
            .map(|_| if rng.gen_bool(0.5) { Domain::Free } else { Domain::NonNegative })
            .collect();
        let rows: Vec<Vec<i64>> = (0..eqs).map(|_| (0..vars).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let rhs: Vec<i64> = (0..eqs).map(|_| rng.gen_range(-5..=5) * rng.gen_range(1..=4)).collect();
        let mut system = LinearSystem::new(domains.clone());
        for (row, &b) in rows.iter().zip(&rhs) {
            system.add_equation(big(row), BigInt::from(b)).unwrap();
        }
        let answer = system.feasible().map_err(|e| e.to_string())?;
        if let Some(x) = &answer {
            if !system.is_satisfied_by(x) {
                return Err(format!("witness {x:?} does not satisfy the system"));
            }
        }
        let lows: Vec<i64> = domains.iter().map(|d| if *d == Domain::Free { -20 } else { 0 }).collect();
        let mut x = lows.clone();
        let exhaustive = loop {
            if rows.iter().zip(&rhs).all(|(r, &b)| r.iter().zip(&x).map(|(a, v)| a * v).sum::<i64>() == b) {
                break true;
            }
            let Some(i) = (0..vars).rev().find(|&i| x[i] < 20) else { break false };
            x[i] += 1;
            x[i + 1..].copy_from_slice(&lows[i + 1..]);
        };
        if exhaustive && answer.is_none() {
            return Err(format!("missed a solution: rows {rows:?} rhs {rhs:?} domains {domains:?}"));
        }
        agreed += 1;
    }
    Ok(format!("{agreed}/200 systems agree with box search; all witnesses verified"))
}

fn random_trace(rng: &mut ChaCha8Rng, rank: u32, pairs: usize) -> TwistTrace {
    let len = rng.gen_range(0..=2);
    let lead = random_word(rng, rank, len);
    let crossings = if pairs == 0 { 0 } else { rng.gen_range(0..=3) };
    let crossings = (0..crossings)
        .map(|_| {
            let t = loop {
                let len = rng.gen_range(1..=2);
                let t = random_word(rng, rank, len);
                if !t.reduce().is_empty() {
                    break t;
                }
            };
            let len = rng.gen_range(0..=2);
            let w = random_word(rng, rank, len);
            TwistCrossing::new(t, w, rng.gen_range(1..=2 * pairs)).unwrap()
        })
        .collect();
    TwistTrace::new(lead, crossings)
}

fn random_extension(rng: &mut ChaCha8Rng) -> ExtensionInstance {
    let rank = rng.gen_range(1..=2);
    let pairs = rng.gen_range(0..=2);
    let traces = (0..rank).map(|_| random_trace(rng, rank, pairs)).collect();
    ExtensionInstance::new(rank, pairs, traces).unwrap()
}

/// Exponent-sum obstruction, computed independently of the solver: some
/// generator's abelianized equation `Σ c_s h_s = b` has `gcd(c) ∤ b`.
fn abelian_obstruction(e: &ExtensionInstance) -> bool {
    let m = e.pairs();
    for trace in e.traces() {
        for g in 0..e.rank() as usize {
            let mut coefficients = vec![0i64; m];
            let mut constant = trace.lead().exponent_sums()[g];
            for c in trace.crossings() {
                let s = c.t().exponent_sums()[g];
                if c.curve() <= m {
                    coefficients[c.curve() - 1] += s;
                } else {
                    coefficients[c.curve() - m - 1] -= s;
                }
                constant += c.w().exponent_sums()[g];
            }
            let gcd = coefficients.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
            let blocked = if gcd == 0 { constant != 0 } else { constant % gcd != 0 };
            if blocked {
                return true;
            }
        }
    }
    false
}

fn twist_extension() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut positives = 0;
    for _ in 0..50 {
        let e = random_extension(&mut rng);
        let brute = brute_extension(&e, 5).map_err(|x| x.to_string())?;
        let decided = decide_extension(&e).map_err(|x| format!("{}: {x}", e.to_json()))?;
        if let Some(h) = &decided {
            let h = small(h).ok_or_else(|| format!("{}: witness too large", e.to_json()))?;
            if !e.is_witness(&h).unwrap() {
                return Err(format!("{}: witness {h:?} does not verify", e.to_json()));
            }
        }
        if brute.is_some() {
            positives += 1;
            if decided.is_none() {
                return Err(format!("{}: box witness {brute:?} but decided no", e.to_json()));
            }
        }
    }
    let mut obstructed = 0;
    while obstructed < 20 {
        let e = random_extension(&mut rng);
        if !abelian_obstruction(&e) {
            continue;
        }
        obstructed += 1;
        if let Some(h) = decide_extension(&e).map_err(|x| x.to_string())? {
            return Err(format!("{}: obstructed but decided yes with {h:?}", e.to_json()));
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("50 random instances ({positives} with box witnesses) and 20 obstructed instances"))
}

fn run(name: &str, check: impl FnOnce() -> Outcome + panic::UnwindSafe) -> bool {
    run_since(name, Instant::now(), check)
}

/// Like [`run`], but the reported time counts from `start` so criteria that
/// share one computation report its cost.
fn run_since(name: &str, start: Instant, check: impl FnOnce() -> Outcome + panic::UnwindSafe) -> bool {
    let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    match outcome {
        Ok(detail) => {
            println!("PASS {name} ({took:.2?}): {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {name} ({took:.2?}): {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = run("criterion 1, band-system goldens", band_goldens);

    let start = Instant::now();
    let d = differential();
    let [membership, soundness, bound] = &d.failures;
    let limit = Duration::from_secs(600);
    ok &= run_since("criterion 2, differential against brute force", start, || {
        within(start, limit)?;
        verdict(
            membership,
            format!("{} (instance, point) pairs agree", d.pairs),
        )
    });
    ok &= run_since("criterion 3, soundness sampling", start, || {
        verdict(
            soundness,
            format!("{} samples over {} components", d.samples, d.components),
        )
    });
    ok &= run_since("criterion 4, length bound construction", start, || {
        verdict(
            bound,
            format!("{} oracle solutions have enumerated bundles within the bound", d.bundles_checked),
        )
    });

    ok &= run("criterion 5, band-system identities", band_identities);
    ok &= run("criterion 6, feasibility engine", feasibility);
    ok &= run("criterion 7, twist extension", twist_extension);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
