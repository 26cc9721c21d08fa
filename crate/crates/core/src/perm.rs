//! Permutations in one-line notation, right insertion and insertion codes.
//!
//! Values are 1-based everywhere: a permutation of length `n` is a
//! sequence containing each of `1..=n` exactly once, and insertion ranks
//! range over `1..=n+1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1, ..., n}` in one-line notation.
///
/// The empty permutation (n = 0) is a valid value; it is the root of every
/// insertion history.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &x in &values {
            if x == 0 || x > n {
                return Err(Error::domain(format!(
                    "value {x} is outside 1..={n} in {values:?}"
                )));
            }
            if std::mem::replace(&mut seen[x - 1], true) {
                return Err(Error::domain(format!("value {x} repeated in {values:?}")));
            }
        }
        Ok(Permutation(values))
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Every permutation of length `n` in lexicographic order.
    ///
    /// Generated by the classical next-permutation step, so it shares no code
    /// with the insertion-code machinery and can serve as a test oracle.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=n).collect()),
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(values: Vec<usize>) -> Result<Self> {
        Permutation::new(values)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// Formats without separators when every value is a single digit
/// (`132`), comma-separated otherwise (`10,2,1,...`). The empty
/// permutation formats as the empty string.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_one_line(f, &self.0)
    }
}

fn write_one_line(f: &mut fmt::Formatter<'_>, values: &[usize]) -> fmt::Result {
    let compact = values.iter().all(|&x| x <= 9);
    for (i, x) in values.iter().enumerate() {
        if i > 0 && !compact {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values: Vec<usize> = if s.is_empty() {
            Vec::new()
        } else if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::domain(format!("bad entry {t:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::domain(format!("bad character {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(values)
    }
}

/// Iterator returned by [`Permutation::all`].
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Rightmost ascent, swap with the smallest larger element to its right,
        // reverse the tail.
        if let Some(i) = (1..succ.len()).rev().find(|&i| succ[i - 1] < succ[i]) {
            let pivot = i - 1;
            let j = (i..succ.len()).rev().find(|&j| succ[j] > succ[pivot]).unwrap();
            succ.swap(pivot, j);
            succ[i..].reverse();
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

/// A classical pattern: a permutation of length `k >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Permutation", into = "Permutation")]
pub struct Pattern(Permutation);

impl Pattern {
    pub fn new(perm: Permutation) -> Result<Self> {
        if perm.len() < 2 {
            return Err(Error::domain(format!(
                "patterns need length at least 2, got {:?}",
                perm.values()
            )));
        }
        Ok(Pattern(perm))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[usize] {
        self.0.values()
    }

    /// `(v_1, ..., v_{k-1})`.
    pub fn prefix(&self) -> &[usize] {
        &self.0.values()[..self.k() - 1]
    }

    /// `v_k`.
    pub fn last(&self) -> usize {
        self.0.values()[self.k() - 1]
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }
}

impl TryFrom<Permutation> for Pattern {
    type Error = Error;

    fn try_from(p: Permutation) -> Result<Self> {
        Pattern::new(p)
    }
}

impl From<Pattern> for Permutation {
    fn from(p: Pattern) -> Self {
        p.0
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::new(s.parse()?)
    }
}

/// A right-insertion code `(r_1, ..., r_n)` with `1 <= r_j <= j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct InsertionCode(Vec<usize>);

impl InsertionCode {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        for (j, &r) in ranks.iter().enumerate() {
            if r == 0 || r > j + 1 {
                return Err(Error::domain(format!(
                    "code entry r_{} = {r} is outside 1..={}",
                    j + 1,
                    j + 1
                )));
            }
        }
        Ok(InsertionCode(ranks))
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `n!` codes of length `n`, in lexicographic order.
    pub fn all(n: usize) -> AllCodes {
        AllCodes {
            next: Some(vec![1; n]),
        }
    }
}

impl TryFrom<Vec<usize>> for InsertionCode {
    type Error = Error;

    fn try_from(ranks: Vec<usize>) -> Result<Self> {
        InsertionCode::new(ranks)
    }
}

impl From<InsertionCode> for Vec<usize> {
    fn from(c: InsertionCode) -> Self {
        c.0
    }
}

impl fmt::Display for InsertionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// Iterator returned by [`InsertionCode::all`].
pub struct AllCodes {
    next: Option<Vec<usize>>,
}

impl Iterator for AllCodes {
    type Item = InsertionCode;

    fn next(&mut self) -> Option<InsertionCode> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Odometer with mixed radix j at position j.
        for j in (0..succ.len()).rev() {
            if succ[j] < j + 1 {
                succ[j] += 1;
                self.next = Some(succ);
                break;
            }
            succ[j] = 1;
        }
        Some(InsertionCode(current))
    }
}

/// Rank-bumping map: `q` if `q < r`, `q + 1` otherwise.
#[inline]
pub fn bump_map(r: usize, q: usize) -> usize {
    if q < r {
        q
    } else {
        q + 1
    }
}

/// Appends a new rightmost entry of value `r`, shifting every old value
/// `>= r` up by one. Requires `1 <= r <= n + 1`.
pub fn insert_right(pi: &Permutation, r: usize) -> Result<Permutation> {
    let n = pi.len();
    if r == 0 || r > n + 1 {
        return Err(Error::domain(format!(
            "rank {r} outside 1..={} for permutation of length {n}",
            n + 1
        )));
    }
    Ok(insert_right_unchecked(pi, r))
}

pub(crate) fn insert_right_unchecked(pi: &Permutation, r: usize) -> Permutation {
    let mut values = Vec::with_capacity(pi.len() + 1);
    values.extend(pi.0.iter().map(|&x| bump_map(r, x)));
    values.push(r);
    Permutation(values)
}

/// Folds [`insert_right`] over the code starting from the empty permutation.
pub fn decode(code: &InsertionCode) -> Permutation {
    code.0
        .iter()
        .fold(Permutation::empty(), |pi, &r| insert_right_unchecked(&pi, r))
}

/// The unique code whose decoding is `pi`.
pub fn encode(pi: &Permutation) -> InsertionCode {
    let mut values = pi.0.clone();
    let mut ranks = vec![0; values.len()];
    // Undo right insertions from the end: the last value is the rank used,
    // then the remaining values are standardized back down.
    while let Some(r) = values.pop() {
        ranks[values.len()] = r;
        for x in values.iter_mut() {
            if *x > r {
                *x -= 1;
            }
        }
    }
    InsertionCode(ranks)
}

/// True iff `a_i < a_j <=> b_i < b_j` for all `i, j`.
pub fn is_order_isomorphic(a: &[usize], b: &[usize]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Brute-force containment test: does some length-`k` subsequence of `pi`
/// have the same relative order as `v`?
///
/// Backtracks over increasing index tuples, abandoning a branch as soon as
/// the chosen prefix stops matching `v`'s prefix. Deliberately independent
/// of the frontier machinery so it can check it.
pub fn contains_pattern(pi: &Permutation, v: &Pattern) -> bool {
    let k = v.k();
    if pi.len() < k {
        return false;
    }
    let mut chosen = Vec::with_capacity(k);
    extend_occurrence(pi.values(), v.values(), 0, &mut chosen)
}

fn extend_occurrence(pi: &[usize], v: &[usize], from: usize, chosen: &mut Vec<usize>) -> bool {
    let t = chosen.len();
    if t == v.len() {
        return true;
    }
    let need_after = v.len() - t - 1;
    for i in from..pi.len() - need_after {
        let y = pi[i];
        let fits = chosen
            .iter()
            .zip(v)
            .all(|(&x, &vj)| (y < x) == (v[t] < vj));
        if fits {
            chosen.push(y);
            if extend_occurrence(pi, v, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
