//! Counting and enumerating avoiders as legal insertion histories.
//!
//! Two independent routes give `|Av_n(v)|`:
//!
//! * a depth-first search over legal histories, counting the nodes at each
//!   depth (memory proportional to `n`, parallel over subtrees);
//! * iterating the dual transfer operator on a finitely supported measure,
//!   starting from the point mass at the empty permutation, and reading off
//!   total mass (memory proportional to the number of avoiders of length `n`).

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frontier::{FrontierMode, State};
use crate::perm::{contains_pattern, encode, InsertionCode, Pattern, Permutation};

pub const DEFAULT_CAP: u64 = 10_000_000;
pub const DEFAULT_PUSH_FORWARD_MAX_LEN: usize = 11;

/// Finitely supported nonnegative measure on states of one fixed length.
///
/// A state is determined by its permutation (the frontier is a function of
/// it), so the support is keyed by permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pattern: Pattern,
    length: usize,
    support: BTreeMap<Permutation, BigUint>,
}

impl Measure {
    /// Point mass at the empty permutation.
    pub fn root(pattern: Pattern) -> Self {
        let mut support = BTreeMap::new();
        support.insert(Permutation::empty(), BigUint::one());
        Measure {
            pattern,
            length: 0,
            support,
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Common length of every state in the support.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn support(&self) -> &BTreeMap<Permutation, BigUint> {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn coefficient(&self, pi: &Permutation) -> BigUint {
        self.support.get(pi).cloned().unwrap_or_default()
    }

    pub fn total_mass(&self) -> BigUint {
        self.support.values().sum()
    }

    /// One application of the dual operator: every state sends its mass to
    /// each of its legal one-step extensions.
    pub fn push_forward(&self) -> Measure {
        let mut next: BTreeMap<Permutation, BigUint> = BTreeMap::new();
        for (pi, c) in &self.support {
            let x = State::from_avoider(pi.clone(), &self.pattern);
            for r in x.legal_ranks() {
                let y = crate::perm::insert_right_unchecked(pi, r);
                *next.entry(y).or_default() += c;
            }
        }
        Measure {
            pattern: self.pattern.clone(),
            length: self.length + 1,
            support: next,
        }
    }
}

/// Free-function form of [`Measure::push_forward`].
pub fn push_forward(mu: &Measure) -> Measure {
    mu.push_forward()
}

/// `a_0, ..., a_N` for one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pattern: Pattern,
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn new(pattern: Pattern, counts: Vec<BigUint>) -> Self {
        CountTable { pattern, counts }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Largest `n` in the table.
    pub fn n_max(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.counts.get(n)
    }

    /// Counts that fit in a `u64`, for convenient comparisons.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.counts.iter().map(|c| c.try_into().ok()).collect()
    }

    /// CSV with header `n,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count\n");
        for (n, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{n},{c}\n"));
        }
        out
    }

    /// `{"pattern": "132", "counts": [1, 1, 2, ...]}`, counts as exact JSON
    /// integers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("count table serialization cannot fail")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let counts = self
            .counts
            .iter()
            .map(|c| serde_json::Value::Number(c.to_string().parse().expect("decimal integer")))
            .collect();
        serde_json::json!({ "pattern": self.pattern.to_string(), "counts": serde_json::Value::Array(counts) })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::domain(format!("bad count table JSON: {e}")))?;
        let pattern = value["pattern"]
            .as_str()
            .ok_or_else(|| Error::domain("count table JSON lacks a \"pattern\" string"))?
            .parse()?;
        let counts = value["counts"]
            .as_array()
            .ok_or_else(|| Error::domain("count table JSON lacks a \"counts\" array"))?
            .iter()
            .map(|c| match c {
                serde_json::Value::Number(num) => num
                    .to_string()
                    .parse::<BigUint>()
                    .map_err(|_| Error::domain(format!("count {num} is not a nonnegative integer"))),
                other => Err(Error::domain(format!("count {other} is not a number"))),
            })
            .collect::<Result<_>>()?;
        Ok(CountTable { pattern, counts })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    #[default]
    Dfs,
    PushForward,
}

#[derive(Debug, Clone)]
pub struct CountConfig {
    pub method: CountMethod,
    /// Number of worker threads for the DFS route.
    pub workers: usize,
    /// Depth of the prefix tree handed out as independent subtrees.
    pub split_depth: usize,
    /// Maximum number of states visited (DFS) or held in one measure
    /// (push-forward).
    pub cap: u64,
    pub frontier_mode: FrontierMode,
    /// Largest `n` the push-forward route accepts.
    pub push_forward_max_len: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            method: CountMethod::Dfs,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            split_depth: 5,
            cap: DEFAULT_CAP,
            frontier_mode: FrontierMode::Incremental,
            push_forward_max_len: DEFAULT_PUSH_FORWARD_MAX_LEN,
        }
    }
}

/// `|Av_n(v)|` for `n = 0..=n_max`, with the default configuration.
pub fn count_avoiders(v: &Pattern, n_max: usize) -> Result<CountTable> {
    count_avoiders_with(v, n_max, &CountConfig::default())
}

pub fn count_avoiders_with(v: &Pattern, n_max: usize, config: &CountConfig) -> Result<CountTable> {
    match config.method {
        CountMethod::Dfs => count_by_dfs(v, n_max, config),
        CountMethod::PushForward => count_by_push_forward(v, n_max, config),
    }
}

/// Counts legal histories by depth-first search.
///
/// The tree is cut at `split_depth`; the subtrees below the cut are explored
/// independently on a pool of `workers` threads and their per-depth counts
/// added exactly, so the result does not depend on the schedule.
pub fn count_by_dfs(v: &Pattern, n_max: usize, config: &CountConfig) -> Result<CountTable> {
    if config.workers == 0 {
        return Err(Error::domain("workers must be at least 1"));
    }
    let visited = AtomicU64::new(0);
    let budget = Budget {
        visited: &visited,
        cap: config.cap,
    };
    let split = config.split_depth.min(n_max);

    // Breadth-first down to the cut, counting the shallow layers directly.
    let mut counts = vec![0u64; n_max + 1];
    let mut layer = vec![State::root()];
    for slot in counts.iter_mut().take(split) {
        *slot = layer.len() as u64;
        budget.charge(layer.len() as u64)?;
        layer = layer
            .iter()
            .flat_map(|x| {
                x.legal_ranks()
                    .into_iter()
                    .map(move |r| step_by(x, v, r, config.frontier_mode))
            })
            .collect::<Result<_>>()?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Invariant(format!("cannot build worker pool: {e}")))?;
    let below: Vec<u64> = pool.install(|| {
        layer
            .par_iter()
            .map(|x| {
                let mut local = vec![0u64; n_max + 1];
                dfs(x, v, n_max, config.frontier_mode, &budget, &mut local)?;
                Ok(local)
            })
            .try_reduce(|| vec![0u64; n_max + 1], add_counts)
    })?;
    let counts = add_counts(counts, below)?;
    Ok(CountTable::new(
        v.clone(),
        counts.into_iter().map(BigUint::from).collect(),
    ))
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Result<Vec<u64>> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x
            .checked_add(y)
            .ok_or_else(|| Error::limit("64-bit node counter overflow", u64::MAX))?;
    }
    Ok(a)
}

struct Budget<'a> {
    visited: &'a AtomicU64,
    cap: u64,
}

impl Budget<'_> {
    fn charge(&self, nodes: u64) -> Result<()> {
        let before = self.visited.fetch_add(nodes, Ordering::Relaxed);
        if before + nodes > self.cap {
            return Err(Error::limit("states visited", self.cap));
        }
        Ok(())
    }
}

fn step_by(x: &State, v: &Pattern, r: usize, mode: FrontierMode) -> Result<State> {
    match mode {
        FrontierMode::Recompute => Ok(x.step_recompute(v, r)),
        FrontierMode::Incremental => Ok(x.step_incremental(v, r)),
        FrontierMode::CrossCheck => x.step_with(v, r, mode),
    }
}

fn dfs(
    x: &State,
    v: &Pattern,
    n_max: usize,
    mode: FrontierMode,
    budget: &Budget<'_>,
    counts: &mut [u64],
) -> Result<()> {
    budget.charge(1)?;
    counts[x.s()] += 1;
    if x.s() == n_max {
        return Ok(());
    }
    let legal = x.legal_ranks();
    if x.s() + 1 == n_max && mode != FrontierMode::CrossCheck {
        // Leaves are most of the tree and only need counting.
        budget.charge(legal.len() as u64)?;
        counts[n_max] += legal.len() as u64;
        return Ok(());
    }
    for r in legal {
        let y = step_by(x, v, r, mode)?;
        dfs(&y, v, n_max, mode, budget, counts)?;
    }
    Ok(())
}

/// Total masses of the iterates of the dual operator applied to the point
/// mass at the root.
pub fn count_by_push_forward(v: &Pattern, n_max: usize, config: &CountConfig) -> Result<CountTable> {
    if n_max > config.push_forward_max_len {
        return Err(Error::limit(
            format!("push-forward length {n_max}"),
            config.push_forward_max_len as u64,
        ));
    }
    let mut mu = Measure::root(v.clone());
    let mut counts = vec![mu.total_mass()];
    for _ in 0..n_max {
        mu = mu.push_forward();
        if mu.support_size() as u64 > config.cap {
            return Err(Error::limit("measure support size", config.cap));
        }
        counts.push(mu.total_mass());
    }
    Ok(CountTable::new(v.clone(), counts))
}

/// Every avoider of length `n`, each exactly once, in lexicographic order
/// of insertion codes.
pub fn enumerate_avoiders(v: &Pattern, n: usize) -> Avoiders {
    let root = State::root();
    let ranks = root.legal_ranks();
    Avoiders {
        pattern: v.clone(),
        target: n,
        stack: vec![(root, ranks, 0)],
    }
}

/// Iterator returned by [`enumerate_avoiders`].
pub struct Avoiders {
    pattern: Pattern,
    target: usize,
    stack: Vec<(State, Vec<usize>, usize)>,
}

impl Iterator for Avoiders {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        loop {
            let (x, ranks, next) = self.stack.last_mut()?;
            if x.s() == self.target {
                let done = self.stack.pop().expect("nonempty stack");
                return Some(done.0.perm().clone());
            }
            match ranks.get(*next) {
                Some(&r) => {
                    *next += 1;
                    let y = x.step_incremental(&self.pattern, r);
                    let yr = y.legal_ranks();
                    self.stack.push((y, yr, 0));
                }
                None => {
                    self.stack.pop();
                }
            }
        }
    }
}

/// The insertion code of an avoider, with every step certified legal.
pub fn history_of(pi: &Permutation, v: &Pattern) -> Result<InsertionCode> {
    if contains_pattern(pi, v) {
        return Err(Error::domain(format!("{pi} contains {v}")));
    }
    let code = encode(pi);
    let mut x = State::root();
    for &r in code.ranks() {
        if !x.is_legal(r) {
            return Err(Error::Invariant(format!(
                "rank {r} of the code of {pi} is illegal at {}",
                x.perm()
            )));
        }
        x = x.step_incremental(v, r);
    }
    if x.perm() != pi {
        return Err(Error::Invariant(format!(
            "replaying the code of {pi} produced {}",
            x.perm()
        )));
    }
    Ok(code)
}

/// All states of length `depth`, in lexicographic order of codes.
pub fn states_at_depth(v: &Pattern, depth: usize) -> Vec<State> {
    let mut layer = vec![State::root()];
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|x| x.legal_ranks().into_iter().map(move |r| x.step_incremental(v, r)))
            .collect();
    }
    layer
}

impl std::ops::Index<usize> for CountTable {
    type Output = BigUint;

    fn index(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn oracle_count(v: &Pattern, n: usize) -> u64 {
        Permutation::all(n).filter(|p| !contains_pattern(p, v)).count() as u64
    }

    #[test]
    fn push_forward_from_root() {
        let mu = Measure::root(pat("132"));
        let nu = push_forward(&mu);
        assert_eq!(nu.length(), 1);
        assert_eq!(nu.support_size(), 1);
        assert_eq!(nu.coefficient(&"1".parse().unwrap()), BigUint::one());
    }

    #[test]
    fn push_forward_mass_rearrangement() {
        let v = pat("1342");
        let mut mu = Measure::root(v.clone());
        for _ in 0..5 {
            let expected: BigUint = mu
                .support()
                .iter()
                .map(|(p, c)| c * State::new(p.clone(), &v).unwrap().legal_ranks().len())
                .sum();
            mu = mu.push_forward();
            assert_eq!(mu.total_mass(), expected);
            assert!(mu.support().keys().all(|p| p.len() == mu.length()));
        }
    }

    #[test]
    fn third_iterate_for_132_has_mass_five() {
        let v = pat("132");
        let mut mu = Measure::root(v.clone());
        for _ in 0..3 {
            mu = mu.push_forward();
        }
        assert_eq!(mu.total_mass(), BigUint::from(oracle_count(&v, 3)));
        assert_eq!(mu.total_mass(), BigUint::from(5u32));
    }

    #[test]
    fn count_132_up_to_5() {
        let t = count_avoiders(&pat("132"), 5).unwrap();
        assert_eq!(t.to_u64s().unwrap(), vec![1, 1, 2, 5, 14, 42]);
        for n in 0..=5 {
            assert_eq!(t.to_u64s().unwrap()[n], oracle_count(&pat("132"), n));
        }
    }

    #[test]
    fn count_123_equals_132_at_8() {
        let a = count_avoiders(&pat("123"), 8).unwrap();
        let b = count_avoiders(&pat("132"), 8).unwrap();
        assert_eq!(a[8], b[8]);
        assert_eq!(a[8], BigUint::from(1430u32));
    }

    #[test]
    fn branching_bound_on_counts() {
        for v in ["123", "1342", "2143", "12345"] {
            let t = count_avoiders(&pat(v), 8).unwrap();
            for n in 1..=8 {
                assert!(t[n] <= &t[n - 1] * n);
            }
        }
    }

    #[test]
    fn twelve_has_one_avoider_per_length() {
        let t = count_avoiders(&pat("12"), 15).unwrap();
        assert!(t.counts().iter().all(|c| c.is_one()));
    }

    #[test]
    fn dfs_and_push_forward_agree() {
        let pf = CountConfig {
            method: CountMethod::PushForward,
            ..CountConfig::default()
        };
        for v in ["231", "1324", "4321"] {
            let v = pat(v);
            assert_eq!(
                count_avoiders(&v, 8).unwrap(),
                count_avoiders_with(&v, 8, &pf).unwrap()
            );
        }
    }

    #[test]
    fn push_forward_length_cap() {
        let cfg = CountConfig {
            method: CountMethod::PushForward,
            push_forward_max_len: 4,
            ..CountConfig::default()
        };
        assert!(matches!(
            count_avoiders_with(&pat("123"), 5, &cfg),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn dfs_state_cap() {
        let cfg = CountConfig {
            cap: 100,
            ..CountConfig::default()
        };
        assert!(matches!(
            count_avoiders_with(&pat("123"), 10, &cfg),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn counts_independent_of_partition() {
        let v = pat("2143");
        let base = count_avoiders(&v, 9).unwrap();
        for workers in [1, 2, 3, 8] {
            for split_depth in [0, 1, 2, 4, 9, 12] {
                let cfg = CountConfig {
                    workers,
                    split_depth,
                    ..CountConfig::default()
                };
                assert_eq!(count_avoiders_with(&v, 9, &cfg).unwrap(), base);
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let v = pat("123");
        let all: Vec<Permutation> = enumerate_avoiders(&v, 0).collect();
        assert_eq!(all, vec![Permutation::empty()]);

        let got: HashSet<Permutation> = enumerate_avoiders(&v, 3).collect();
        let want: HashSet<Permutation> = Permutation::all(3).filter(|p| !contains_pattern(p, &v)).collect();
        assert_eq!(got.len(), 5);
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_follows_code_order() {
        let codes: Vec<InsertionCode> = enumerate_avoiders(&pat("1342"), 6).map(|p| encode(&p)).collect();
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn history_examples() {
        let v = pat("123");
        assert!(history_of(&Permutation::empty(), &v).unwrap().is_empty());
        let h = history_of(&"132".parse().unwrap(), &v).unwrap();
        assert_eq!(h.ranks(), &[1, 2, 2]);
        assert!(matches!(history_of(&"123".parse().unwrap(), &v), Err(Error::Domain(_))));
    }

    #[test]
    fn histories_certified_for_av6_1324() {
        let v = pat("1324");
        let mut n = 0;
        for pi in Permutation::all(6).filter(|p| !contains_pattern(p, &v)) {
            history_of(&pi, &v).unwrap();
            n += 1;
        }
        assert_eq!(n, 513);
    }

    #[test]
    fn count_table_serialization() {
        let t = count_avoiders(&pat("132"), 4).unwrap();
        assert_eq!(t.to_csv(), "n,count\n0,1\n1,1\n2,2\n3,5\n4,14\n");
        assert_eq!(t.to_json(), r#"{"pattern":"132","counts":[1,1,2,5,14]}"#);
        assert_eq!(CountTable::from_json(&t.to_json()).unwrap(), t);

        let big = CountTable::new(pat("12"), vec!["123456789012345678901234567890".parse().unwrap()]);
        assert_eq!(CountTable::from_json(&big.to_json()).unwrap(), big);
        assert!(CountTable::from_json(r#"{"pattern":"132","counts":[-1]}"#).is_err());
    }
}
