//! Frontiers of `(k-1)`-partial occurrences and the legal right insertions
//! they leave open.
//!
//! A `(k-1)`-partial occurrence of `v` in `pi` is a tuple of positions whose
//! values have the relative order of `v_1 ... v_{k-1}`. Inserting a new
//! rightmost value completes it to a copy of `v` exactly when the inserted
//! rank lies in a contiguous interval `[a, b]` computed from the occurrence's
//! values. The frontier keeps the occurrences whose interval is nonempty, and
//! a rank is legal when it avoids all of those intervals.
//!
//! Positions are 1-based, as are values and ranks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{contains_pattern, insert_right_unchecked, Pattern, Permutation};

pub use crate::perm::bump_map;

/// Strictly increasing 1-based positions `i_1 < ... < i_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialOccurrence(Vec<usize>);

impl PartialOccurrence {
    pub fn new(positions: Vec<usize>) -> Self {
        PartialOccurrence(positions)
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }
}

/// Integer interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankInterval {
    pub lo: usize,
    pub hi: usize,
}

impl RankInterval {
    pub fn new(lo: usize, hi: usize) -> Self {
        RankInterval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn contains(&self, r: usize) -> bool {
        self.lo <= r && r <= self.hi
    }

    /// Image under the rank-bumping map for an insertion at `r`.
    ///
    /// `r` must lie outside the interval, otherwise the image is not an
    /// interval.
    pub fn bumped(&self, r: usize) -> RankInterval {
        debug_assert!(!self.contains(r));
        RankInterval::new(bump_map(r, self.lo), bump_map(r, self.hi))
    }
}

impl Serialize for RankInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[usize; 2]>::deserialize(d)?;
        Ok(RankInterval { lo, hi })
    }
}

/// A partial occurrence together with its (nonempty) forbidden interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrontierElement {
    #[serde(rename = "positions")]
    pub occurrence: PartialOccurrence,
    pub interval: RankInterval,
}

/// How [`State::step_with`] obtains the successor's frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontierMode {
    /// Enumerate every partial occurrence of the new permutation.
    Recompute,
    /// Transport the old frontier through the bump map and search only for
    /// occurrences ending at the new rightmost position.
    #[default]
    Incremental,
    /// Do both and fail with [`Error::Invariant`] if they differ.
    CrossCheck,
}

/// A `v`-avoiding permutation together with its frontier, sorted by position
/// tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    #[serde(rename = "perm")]
    perm: Permutation,
    frontier: Vec<FrontierElement>,
}

impl State {
    /// The empty permutation, whose frontier is empty for every pattern.
    pub fn root() -> Self {
        State {
            perm: Permutation::empty(),
            frontier: Vec::new(),
        }
    }

    /// Builds the state over `pi`, which must avoid `v`.
    pub fn new(pi: Permutation, v: &Pattern) -> Result<Self> {
        let frontier = compute_frontier(&pi, v)?;
        Ok(State { perm: pi, frontier })
    }

    /// Builds the state without checking avoidance. `pi` must avoid `v`.
    pub(crate) fn from_avoider(pi: Permutation, v: &Pattern) -> Self {
        let frontier = frontier_of(&pi, v);
        State { perm: pi, frontier }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn frontier(&self) -> &[FrontierElement] {
        &self.frontier
    }

    /// Frontier size `m(x)`.
    pub fn m(&self) -> usize {
        self.frontier.len()
    }

    /// Length `s(x)`.
    pub fn s(&self) -> usize {
        self.perm.len()
    }

    /// Union of the frontier intervals as sorted, disjoint, non-adjacent
    /// intervals.
    pub fn forbidden(&self) -> Vec<RankInterval> {
        merge_intervals(self.frontier.iter().map(|e| e.interval))
    }

    /// Ranks in `1..=s+1` outside every frontier interval, ascending.
    pub fn legal_ranks(&self) -> Vec<usize> {
        let mut legal = Vec::with_capacity(self.s() + 1);
        let mut next = 1;
        for iv in self.forbidden() {
            legal.extend(next..iv.lo);
            next = iv.hi + 1;
        }
        legal.extend(next..=self.s() + 1);
        legal
    }

    pub fn is_legal(&self, r: usize) -> bool {
        r >= 1 && r <= self.s() + 1 && !self.frontier.iter().any(|e| e.interval.contains(r))
    }

    /// Inserts `r` on the right and recomputes the frontier from scratch.
    pub fn step(&self, v: &Pattern, r: usize) -> Result<State> {
        self.step_with(v, r, FrontierMode::Recompute)
    }

    pub fn step_with(&self, v: &Pattern, r: usize, mode: FrontierMode) -> Result<State> {
        if !self.is_legal(r) {
            return Err(Error::domain(format!(
                "rank {r} is not a legal insertion into {} for pattern {v}",
                self.perm
            )));
        }
        match mode {
            FrontierMode::Recompute => Ok(self.step_recompute(v, r)),
            FrontierMode::Incremental => Ok(self.step_incremental(v, r)),
            FrontierMode::CrossCheck => {
                let a = self.step_recompute(v, r);
                let b = self.step_incremental(v, r);
                if a != b {
                    return Err(Error::Invariant(format!(
                        "incremental frontier disagrees with recomputation after inserting {r} into {}",
                        self.perm
                    )));
                }
                Ok(a)
            }
        }
    }

    /// `r` must be legal.
    pub(crate) fn step_recompute(&self, v: &Pattern, r: usize) -> State {
        let perm = insert_right_unchecked(&self.perm, r);
        let frontier = frontier_of(&perm, v);
        State { perm, frontier }
    }

    /// `r` must be legal.
    pub(crate) fn step_incremental(&self, v: &Pattern, r: usize) -> State {
        let perm = insert_right_unchecked(&self.perm, r);
        let mut frontier: Vec<FrontierElement> = self
            .frontier
            .iter()
            .map(|e| FrontierElement {
                occurrence: e.occurrence.clone(),
                interval: e.interval.bumped(r),
            })
            .collect();
        let old = frontier.len();
        let n = perm.len();
        for_each_partial_occurrence(perm.values(), v.prefix(), Some(n), |positions| {
            let interval = interval_for(perm.values(), v, positions);
            if !interval.is_empty() {
                frontier.push(FrontierElement {
                    occurrence: PartialOccurrence(positions.to_vec()),
                    interval,
                });
            }
        });
        if frontier.len() > old {
            frontier.sort();
        }
        State { perm, frontier }
    }

    /// Debug dump: `{"perm": [..], "frontier": [{"positions": [..], "interval": [a, b]}, ..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization cannot fail")
    }
}

/// Free-function form of [`State::legal_ranks`].
pub fn legal_ranks(x: &State) -> Vec<usize> {
    x.legal_ranks()
}

/// Free-function form of [`State::step`].
pub fn step(x: &State, v: &Pattern, r: usize) -> Result<State> {
    x.step(v, r)
}

/// Sorts and merges intervals, joining overlapping and adjacent ones and
/// dropping empty ones.
pub fn merge_intervals(intervals: impl IntoIterator<Item = RankInterval>) -> Vec<RankInterval> {
    let mut ivs: Vec<RankInterval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
    ivs.sort_unstable();
    let mut merged: Vec<RankInterval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match merged.last_mut() {
            Some(last) if iv.lo <= last.hi + 1 => last.hi = last.hi.max(iv.hi),
            _ => merged.push(iv),
        }
    }
    merged
}

/// Forbidden interval of a partial occurrence:
/// `a = max(x_l + 1 : v_k > v_l)`, `b = min(x_l : v_k < v_l)`, with
/// `a = 1` and `b = n + 1` when the respective set is empty.
pub fn forbidden_interval(pi: &Permutation, v: &Pattern, occ: &PartialOccurrence) -> Result<RankInterval> {
    let pos = occ.positions();
    if pos.len() != v.k() - 1 {
        return Err(Error::domain(format!(
            "partial occurrence {pos:?} has {} positions, pattern {v} needs {}",
            pos.len(),
            v.k() - 1
        )));
    }
    if pos.first().is_some_and(|&i| i == 0)
        || pos.last().is_some_and(|&i| i > pi.len())
        || pos.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::domain(format!(
            "positions {pos:?} are not strictly increasing within 1..={}",
            pi.len()
        )));
    }
    let vals: Vec<usize> = pos.iter().map(|&i| pi.at(i)).collect();
    if !crate::perm::is_order_isomorphic(&vals, v.prefix())? {
        return Err(Error::domain(format!(
            "values {vals:?} at {pos:?} do not match the prefix of {v}"
        )));
    }
    Ok(interval_for(pi.values(), v, pos))
}

fn interval_for(values: &[usize], v: &Pattern, positions: &[usize]) -> RankInterval {
    let last = v.last();
    let mut lo = 1;
    let mut hi = values.len() + 1;
    for (&i, &vl) in positions.iter().zip(v.prefix()) {
        let x = values[i - 1];
        if last > vl {
            lo = lo.max(x + 1);
        } else {
            hi = hi.min(x);
        }
    }
    RankInterval::new(lo, hi)
}

/// Frontier of a `v`-avoiding permutation.
pub fn compute_frontier(pi: &Permutation, v: &Pattern) -> Result<Vec<FrontierElement>> {
    if contains_pattern(pi, v) {
        return Err(Error::domain(format!("{pi} contains {v}; states must avoid the pattern")));
    }
    Ok(frontier_of(pi, v))
}

fn frontier_of(pi: &Permutation, v: &Pattern) -> Vec<FrontierElement> {
    let mut frontier = Vec::new();
    for_each_partial_occurrence(pi.values(), v.prefix(), None, |positions| {
        let interval = interval_for(pi.values(), v, positions);
        if !interval.is_empty() {
            frontier.push(FrontierElement {
                occurrence: PartialOccurrence(positions.to_vec()),
                interval,
            });
        }
    });
    // Enumeration is already lexicographic in positions.
    debug_assert!(frontier.windows(2).all(|w| w[0] < w[1]));
    frontier
}

/// Every `(k-1)`-partial occurrence of `v` in `pi`, including those whose
/// forbidden interval is empty, in lexicographic order.
pub fn partial_occurrences(pi: &Permutation, v: &Pattern) -> Vec<PartialOccurrence> {
    let mut out = Vec::new();
    for_each_partial_occurrence(pi.values(), v.prefix(), None, |positions| {
        out.push(PartialOccurrence(positions.to_vec()))
    });
    out
}

/// One disagreement found by [`soundness_sweep`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessMismatch {
    pub perm: String,
    pub detail: String,
}

/// Result of comparing the frontier against brute-force insertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub pattern: String,
    pub n_max: usize,
    pub states_checked: u64,
    pub ranks_checked: u64,
    pub occurrences_checked: u64,
    pub mismatches: Vec<SoundnessMismatch>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// For every `v`-avoider of length `<= n_max`, checks that the legal ranks
/// are exactly the ranks whose insertion avoids `v` (by the containment
/// oracle), and that each partial occurrence's closed-form interval equals
/// the set of ranks that complete it (by inserting and comparing).
pub fn soundness_sweep(v: &Pattern, n_max: usize) -> SoundnessReport {
    let mut report = SoundnessReport {
        pattern: v.to_string(),
        n_max,
        states_checked: 0,
        ranks_checked: 0,
        occurrences_checked: 0,
        mismatches: Vec::new(),
    };
    let mut stack = vec![State::root()];
    while let Some(x) = stack.pop() {
        report.states_checked += 1;
        let pi = x.perm();
        let n = pi.len();
        let completions: Vec<Permutation> = (1..=n + 1).map(|r| insert_right_unchecked(pi, r)).collect();
        let avoiding: Vec<usize> = (1..=n + 1)
            .filter(|&r| !contains_pattern(&completions[r - 1], v))
            .collect();
        report.ranks_checked += n as u64 + 1;
        let legal = x.legal_ranks();
        if legal != avoiding {
            report.mismatches.push(SoundnessMismatch {
                perm: pi.to_string(),
                detail: format!("legal ranks {legal:?}, avoiding insertions {avoiding:?}"),
            });
        }
        for occ in partial_occurrences(pi, v) {
            report.occurrences_checked += 1;
            let completing: Vec<usize> = (1..=n + 1)
                .filter(|&r| {
                    let q = &completions[r - 1];
                    let mut vals: Vec<usize> = occ.positions().iter().map(|&i| q.at(i)).collect();
                    vals.push(q.at(n + 1));
                    crate::perm::is_order_isomorphic(&vals, v.values()).expect("equal lengths")
                })
                .collect();
            let iv = interval_for(pi.values(), v, occ.positions());
            let contiguous = completing.windows(2).all(|w| w[1] == w[0] + 1);
            let same = completing.len() == iv.len() && completing.first().is_none_or(|&a| a == iv.lo);
            if !contiguous || !same {
                report.mismatches.push(SoundnessMismatch {
                    perm: pi.to_string(),
                    detail: format!(
                        "occurrence {:?}: completing ranks {completing:?}, formula [{}, {}]",
                        occ.positions(),
                        iv.lo,
                        iv.hi
                    ),
                });
            }
        }
        if n < n_max {
            stack.extend(legal.into_iter().map(|r| x.step_recompute(v, r)));
        }
    }
    report
}

/// Calls `visit` with every increasing position tuple whose values are
/// order-isomorphic to `prefix`, in lexicographic order. With
/// `forced_last = Some(p)`, only tuples ending at position `p` are visited.
fn for_each_partial_occurrence(
    values: &[usize],
    prefix: &[usize],
    forced_last: Option<usize>,
    mut visit: impl FnMut(&[usize]),
) {
    let len = prefix.len();
    if values.len() < len {
        return;
    }
    let mut positions = Vec::with_capacity(len);
    let mut chosen = Vec::with_capacity(len);
    search(values, prefix, forced_last, 1, &mut positions, &mut chosen, &mut visit);
}

fn search(
    values: &[usize],
    prefix: &[usize],
    forced_last: Option<usize>,
    from: usize,
    positions: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let t = positions.len();
    if t == prefix.len() {
        visit(positions);
        return;
    }
    let remaining = prefix.len() - t;
    let (start, end) = match forced_last {
        Some(p) if remaining == 1 => (p.max(from), p),
        Some(p) => (from, p + 1 - remaining),
        None => (from, values.len() + 1 - remaining),
    };
    for i in start..=end {
        let y = values[i - 1];
        if chosen.iter().zip(prefix).all(|(&x, &pj)| (y < x) == (prefix[t] < pj)) {
            positions.push(i);
            chosen.push(y);
            search(values, prefix, forced_last, i + 1, positions, chosen, visit);
            positions.pop();
            chosen.pop();
        }
    }
}
