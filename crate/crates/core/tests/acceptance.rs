//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! Every expected value here comes from an oracle that lives in this file
//! (brute-force containment over all of S_n, the Catalan convolution,
//! insert-and-compare forbidden sets, explicit transfer-matrix powers) and
//! shares no code with the enumeration path it checks.

use std::collections::{BTreeSet, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use permfront::analysis::{self, choose_cutoff, choose_kappa, Branching, WeightParams};
use permfront::engine::{self, CountConfig, CountMethod};
use permfront::frontier::{forbidden_interval, PartialOccurrence, RankInterval, State};
use permfront::perm::{
    contains_pattern, decode, encode, insert_right, is_order_isomorphic, InsertionCode, Pattern, Permutation,
};
use permfront::rv::{self, PatternSystem, Step, StripWalk};

const TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pat(s: &str) -> Pattern {
    s.parse().unwrap()
}

fn patterns_of_length(k: usize) -> Vec<Pattern> {
    Permutation::all(k).map(|p| Pattern::new(p).unwrap()).collect()
}

fn oracle_avoiders(v: &Pattern, n: usize) -> Vec<Permutation> {
    Permutation::all(n).filter(|p| !contains_pattern(p, v)).collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Catalan numbers from `C_{n+1} = sum C_i C_{n-i}`.
fn catalan(n_max: usize) -> Vec<u64> {
    let mut c = vec![1u64];
    for n in 0..n_max {
        c.push((0..=n).map(|i| c[i] * c[n - i]).sum());
    }
    c
}

fn criterion_1() -> Outcome {
    let expected: Vec<u64> = vec![1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012];
    check(catalan(12) == expected, || "Catalan recurrence disagrees with the stated table".into())?;
    let mut elapsed = Duration::ZERO;
    for v in ["123", "132", "213", "231", "312", "321"] {
        let v = pat(v);
        let start = Instant::now();
        let got = engine::count_avoiders(&v, 12).map_err(|e| e.to_string())?;
        elapsed += start.elapsed();
        check(got.to_u64s().as_deref() == Some(&expected[..]), || {
            format!("{v}: got {:?}", got.counts())
        })?;
        for (n, &want) in expected.iter().enumerate().take(9) {
            let oracle = oracle_avoiders(&v, n).len() as u64;
            check(oracle == want, || format!("{v}: oracle gives {oracle} at n={n}"))?;
        }
    }
    check(elapsed < Duration::from_secs(10), || format!("counting took {elapsed:?}"))?;
    Ok(format!("six patterns agree through n=12 (counting {elapsed:.2?})"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut compared = 0usize;
    for v in patterns_of_length(4) {
        for n in 0..=8 {
            let got: Vec<Permutation> = engine::enumerate_avoiders(&v, n).collect();
            let set: HashSet<&Permutation> = got.iter().collect();
            check(set.len() == got.len(), || format!("{v}, n={n}: duplicates in enumeration"))?;
            let oracle: HashSet<Permutation> = oracle_avoiders(&v, n).into_iter().collect();
            check(set == oracle.iter().collect(), || format!("{v}, n={n}: set mismatch"))?;
            compared += got.len();
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("24 patterns, {compared} avoiders matched ({elapsed:.2?})"))
}

fn all_patterns_up_to_4() -> Vec<Pattern> {
    (2..=4).flat_map(patterns_of_length).collect()
}

fn criterion_3() -> Outcome {
    let mut states = 0;
    for v in all_patterns_up_to_4() {
        for n in 0..=6 {
            for pi in oracle_avoiders(&v, n) {
                let x = State::new(pi.clone(), &v).map_err(|e| e.to_string())?;
                let avoiding: Vec<usize> = (1..=n + 1)
                    .filter(|&r| !contains_pattern(&insert_right(&pi, r).unwrap(), &v))
                    .collect();
                check(x.legal_ranks() == avoiding, || {
                    format!("{v}, {pi}: legal {:?} vs avoiding {avoiding:?}", x.legal_ranks())
                })?;
                states += 1;
            }
        }
    }
    Ok(format!("{states} states across 32 patterns"))
}

/// Increasing `len`-subsets of `1..=n`.
fn subsets(n: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    (len..=n)
        .flat_map(|last| {
            subsets(last - 1, len - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let mut occurrences = 0;
    for v in all_patterns_up_to_4() {
        let k = v.k();
        for n in 0..=6 {
            for pi in oracle_avoiders(&v, n) {
                for pos in subsets(n, k - 1) {
                    let vals: Vec<usize> = pos.iter().map(|&i| pi.at(i)).collect();
                    if !is_order_isomorphic(&vals, v.prefix()).unwrap() {
                        continue;
                    }
                    occurrences += 1;
                    let completing: Vec<usize> = (1..=n + 1)
                        .filter(|&r| {
                            let q = insert_right(&pi, r).unwrap();
                            let mut w: Vec<usize> = pos.iter().map(|&i| q.at(i)).collect();
                            w.push(q.at(n + 1));
                            is_order_isomorphic(&w, v.values()).unwrap()
                        })
                        .collect();
                    check(completing.windows(2).all(|w| w[1] == w[0] + 1), || {
                        format!("{v}, {pi}, {pos:?}: completing set {completing:?} not contiguous")
                    })?;
                    let iv = forbidden_interval(&pi, &v, &PartialOccurrence::new(pos.clone()))
                        .map_err(|e| e.to_string())?;
                    let as_interval = match (completing.first(), completing.last()) {
                        (Some(&a), Some(&b)) => RankInterval::new(a, b),
                        _ => RankInterval::new(1, 0),
                    };
                    let same = if as_interval.is_empty() {
                        iv.is_empty()
                    } else {
                        iv == as_interval
                    };
                    check(same, || {
                        format!("{v}, {pi}, {pos:?}: formula {iv:?} vs completing {completing:?}")
                    })?;
                }
            }
        }
    }
    Ok(format!("{occurrences} partial occurrences"))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_f00d);
    let mut steps = 0u64;
    for v in ["123", "132", "1342", "2143", "1324"] {
        let v = pat(v);
        let mut x = State::root();
        for _ in 0..10_000 {
            let legal = x.legal_ranks();
            if legal.is_empty() || x.s() >= 14 {
                check(!legal.is_empty(), || format!("{v}: dead end at {}", x.perm()))?;
                x = State::root();
                continue;
            }
            let r = legal[rng.gen_range(0..legal.len())];
            let y = x.step(&v, r).map_err(|e| e.to_string())?;
            check(y.m() >= x.m(), || format!("{v}: m decreased at {} -> {}", x.perm(), y.perm()))?;
            for e in x.frontier() {
                let moved = y.frontier().iter().find(|f| f.occurrence == e.occurrence);
                let expected = RankInterval::new(
                    permfront::frontier::bump_map(r, e.interval.lo),
                    permfront::frontier::bump_map(r, e.interval.hi),
                );
                check(moved.is_some_and(|f| f.interval == expected), || {
                    format!("{v}: element {:?} of {} not transported by r={r}", e, x.perm())
                })?;
            }
            steps += 1;
            x = y;
        }
    }
    check(steps >= 10_000, || format!("only {steps} steps"))?;
    Ok(format!("{steps} random legal steps, zero violations"))
}

fn criterion_6() -> Outcome {
    let pf = CountConfig {
        method: CountMethod::PushForward,
        ..CountConfig::default()
    };
    for v in ["123", "132", "1234", "1342", "1324", "2143"] {
        let v = pat(v);
        let dfs = engine::count_avoiders(&v, 10).map_err(|e| e.to_string())?;
        let mass = engine::count_avoiders_with(&v, 10, &pf).map_err(|e| e.to_string())?;
        check(dfs == mass, || format!("{v}: DFS {:?} vs mass {:?}", dfs.counts(), mass.counts()))?;
        for n in 0..=8 {
            let oracle = BigUint::from(oracle_avoiders(&v, n).len());
            check(dfs[n] == oracle, || format!("{v}: n={n} count {} vs oracle {oracle}", dfs[n]))?;
        }
    }
    Ok("six patterns agree through n=10".into())
}

fn criterion_7() -> Outcome {
    let kappa = choose_kappa(1.0).map_err(|e| e.to_string())?;
    let cutoff = choose_cutoff(kappa, 0.5).map_err(|e| e.to_string())?;
    let params = WeightParams::new(0.5, kappa).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut worst_tail = 0.0f64;
    for v in ["123", "132", "1234", "1342", "1324", "2143"] {
        let v = pat(v);
        let report = analysis::verify_norm_bound(&v, params, 7, 10_000_000).map_err(|e| e.to_string())?;
        let m = analysis::big_m(kappa).map_err(|e| e.to_string())?;
        check(report.m_kappa == m && report.cutoff_c == cutoff, || format!("{v}: report constants differ"))?;
        check(report.max_ratio_observed <= m + TOL, || {
            format!("{v}: max ratio {} > M {m}", report.max_ratio_observed)
        })?;
        for l in report.per_length.iter().filter(|l| l.s > cutoff) {
            check(l.max_ratio <= 0.5 + TOL, || format!("{v}: tail ratio {} at s={}", l.max_ratio, l.s))?;
            worst_tail = worst_tail.max(l.max_ratio);
        }
        check(report.violations.is_empty(), || format!("{v}: {:?}", report.violations))?;
        worst = worst.max(report.max_ratio_observed);
    }
    Ok(format!(
        "kappa={kappa}, M={:.12}, C={cutoff}, max ratio {worst:.12}, max tail ratio {worst_tail:.12}",
        analysis::big_m(kappa).unwrap()
    ))
}

/// Walk counts from explicit powers of the strip's transfer matrix.
fn matrix_counts(width: usize, steps: &[Step], n_max: usize) -> Vec<BigUint> {
    let delta = |s: &Step| match s {
        Step::Up => 1i64,
        Step::Down => -1,
        Step::Stay => 0,
    };
    let mut a = vec![vec![0u64; width]; width];
    for (i, row) in a.iter_mut().enumerate() {
        for s in steps {
            let j = i as i64 + delta(s);
            if (0..width as i64).contains(&j) {
                row[j as usize] += 1;
            }
        }
    }
    let mut power = vec![vec![0u64; width]; width];
    for (i, row) in power.iter_mut().enumerate() {
        row[i] = 1;
    }
    let mut out = Vec::new();
    for _ in 0..=n_max {
        out.push(BigUint::from(power[0].iter().sum::<u64>()));
        power = (0..width)
            .map(|i| (0..width).map(|j| (0..width).map(|l| power[i][l] * a[l][j]).sum()).collect())
            .collect();
    }
    out
}

fn criterion_8() -> Outcome {
    for v in patterns_of_length(3) {
        let report = rv::check_axioms(&PatternSystem::new(v.clone()), 6, 10_000_000).map_err(|e| e.to_string())?;
        check(report.branching == Branching::new(1, 1), || format!("{v}: branching {:?}", report.branching))?;
        check(report.passed(), || format!("{v}: {:?}", report.violations))?;
    }
    let step_sets = [
        vec![Step::Up, Step::Down, Step::Stay],
        vec![Step::Up, Step::Down],
        vec![Step::Stay],
    ];
    for width in 1..=4 {
        for steps in &step_sets {
            let sys = StripWalk::new(width, steps.clone()).map_err(|e| e.to_string())?;
            let report = rv::check_axioms(&sys, 6, 10_000_000).map_err(|e| e.to_string())?;
            check(report.passed(), || format!("strip w={width} {steps:?}: {:?}", report.violations))?;
            let expected = matrix_counts(width, steps, 20);
            let merged = rv::count_histories_merged(&sys, 20, 1_000).map_err(|e| e.to_string())?;
            check(merged == expected, || format!("strip w={width} {steps:?}: {merged:?} vs {expected:?}"))?;
            let dfs = rv::count_histories(&sys, 14, 100_000_000).map_err(|e| e.to_string())?;
            check(dfs[..] == expected[..=14], || format!("strip w={width} {steps:?}: DFS disagrees"))?;
        }
    }
    let w2 = StripWalk::new(2, step_sets[0].clone()).unwrap();
    let counts = rv::count_histories(&w2, 20, 100_000_000).map_err(|e| e.to_string())?;
    let powers: Vec<BigUint> = (0..=20).map(|n| BigUint::from(1u64 << n)).collect();
    check(counts == powers, || format!("w=2 counts {counts:?}"))?;
    Ok("axioms hold; strip counts match matrix powers through n=20".into())
}

fn criterion_9() -> Outcome {
    for n in 0..=7 {
        let oracle: BTreeSet<Permutation> = Permutation::all(n).collect();
        let mut seen = BTreeSet::new();
        let mut codes = 0usize;
        for code in InsertionCode::all(n) {
            let pi = decode(&code);
            check(Permutation::new(pi.values().to_vec()).is_ok(), || format!("{code} decodes to a non-permutation"))?;
            check(encode(&pi) == code, || format!("encode(decode({code})) = {}", encode(&pi)))?;
            check(seen.insert(pi.clone()), || format!("{pi} produced twice"))?;
            codes += 1;
        }
        check(seen == oracle, || format!("n={n}: image is not S_n"))?;
        check(codes == oracle.len(), || format!("n={n}: {codes} codes"))?;
    }
    Ok("bijective for every n <= 7".into())
}

fn criterion_10() -> Outcome {
    let table = engine::count_avoiders(&pat("132"), 14).map_err(|e| e.to_string())?;
    let rows = analysis::growth_estimates(&table).map_err(|e| e.to_string())?;
    let window: Vec<_> = rows.iter().filter(|r| (8..=14).contains(&r.n)).collect();
    check(window.len() == 7, || "missing rows".into())?;
    let summary: Vec<String> = window
        .iter()
        .map(|r| format!("n={} root={:.4} ratio={:.4}", r.n, r.root_estimate, r.ratio_estimate.unwrap()))
        .collect();
    let outside: Vec<String> = window
        .iter()
        .filter(|r| !(3.0..=4.0).contains(&r.root_estimate))
        .map(|r| format!("a_{}^(1/{}) = {:.6}", r.n, r.n, r.root_estimate))
        .collect();
    check(outside.is_empty(), || {
        format!("root estimates outside [3, 4]: {}; table: {}", outside.join(", "), summary.join("; "))
    })?;
    Ok(summary.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Catalan agreement", criterion_1),
        ("length-4 oracle equivalence", criterion_2),
        ("frontier soundness/completeness", criterion_3),
        ("interval property", criterion_4),
        ("frontier monotonicity", criterion_5),
        ("dual-counting identity", criterion_6),
        ("boundedness witness", criterion_7),
        ("growth-system framework", criterion_8),
        ("insertion-code bijection", criterion_9),
        ("growth estimates for 132", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
