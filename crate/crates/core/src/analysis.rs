//! Numeric side of the transfer operator: the weight `theta^m * kappa^(s^2)`,
//! the constant `M(kappa) = sup_s (s+1) kappa^(2s+1)`, the tail cutoff, and
//! exhaustive checks of the single-step weighted estimate on all states up
//! to a given length.
//!
//! For a state `x` of length `s` and frontier size `m`, applying the
//! operator to the extremal test function `f(y) = theta^m(y) kappa^(s(y)^2)`
//! (norm one) and dividing by the weight of `x` gives
//!
//! ```text
//! ratio(x) = kappa^(2s+1) * sum over legal r of theta^(m(y_r) - m(x))
//! ```
//!
//! which is at most `(s+1) kappa^(2s+1) <= M(kappa)` because frontiers never
//! shrink and there are at most `s+1` legal ranks. The weights themselves
//! (`kappa^(s^2)` underflows quickly) only ever appear through this
//! quotient, so no weight is materialized; [`verify_norm_bound_exact`]
//! redoes the sweep in exact rational arithmetic.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::CountTable;
use crate::error::{Error, Result};
use crate::frontier::State;
use crate::perm::Pattern;

/// Relative tolerance for floating-point comparisons against the bounds.
pub const TOLERANCE: f64 = 1e-12;
pub const DEFAULT_THETA: f64 = 0.5;
/// `choose_kappa` searches the grid `j / 2^KAPPA_GRID_BITS`.
pub const KAPPA_GRID_BITS: u32 = 20;

/// Parameters of the weight `theta^m(x) * kappa^(s(x)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightParams {
    theta: f64,
    kappa: f64,
}

impl WeightParams {
    pub fn new(theta: f64, kappa: f64) -> Result<Self> {
        open_unit("theta", theta)?;
        open_unit("kappa", kappa)?;
        Ok(WeightParams { theta, kappa })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `ln` of the weight of a state with frontier size `m` and length `s`.
    pub fn ln_weight(&self, m: usize, s: usize) -> f64 {
        m as f64 * self.theta.ln() + (s as f64).powi(2) * self.kappa.ln()
    }
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} must lie strictly between 0 and 1")))
    }
}

/// Linear branching bound `|A(x)| <= c0 + c1 * s(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Branching {
    pub c0: u64,
    pub c1: u64,
}

impl Branching {
    /// Right insertion into a permutation of length `s` has `s + 1` slots.
    pub const PERMUTATIONS: Branching = Branching { c0: 1, c1: 1 };

    pub fn new(c0: u64, c1: u64) -> Self {
        Branching { c0, c1 }
    }

    pub fn at(&self, s: usize) -> u64 {
        self.c0 + self.c1 * s as u64
    }

    /// `(c0 + c1 s) * kappa^(2s+1)`.
    pub fn step_factor(&self, kappa: f64, s: usize) -> f64 {
        self.at(s) as f64 * kappa.powi((2 * s + 1) as i32)
    }

    /// Index of the largest step factor. The sequence is log-concave in
    /// `s`, so the first non-increase marks the peak.
    fn peak(&self, kappa: f64) -> usize {
        let mut s = 0;
        while self.step_factor(kappa, s + 1) > self.step_factor(kappa, s) || self.at(s) == 0 {
            if self.c0 == 0 && self.c1 == 0 {
                return 0;
            }
            s += 1;
        }
        s
    }

    /// Generalized `M(kappa) = sup_s (c0 + c1 s) kappa^(2s+1)`.
    pub fn sup_step_factor(&self, kappa: f64) -> Result<f64> {
        open_unit("kappa", kappa)?;
        Ok(self.step_factor(kappa, self.peak(kappa)))
    }

    /// `sup_{s >= from} (c0 + c1 s) kappa^(2s+1)`.
    pub fn tail_sup(&self, kappa: f64, from: usize) -> Result<f64> {
        open_unit("kappa", kappa)?;
        Ok(self.step_factor(kappa, self.peak(kappa).max(from)))
    }

    /// Largest grid point `kappa = j / 2^20` with generalized `M(kappa) <= target`.
    pub fn choose_kappa(&self, target: f64) -> Result<f64> {
        if !target.is_finite() || target <= 0.0 {
            return Err(Error::domain(format!("target {target} must be positive and finite")));
        }
        let grid = 1u64 << KAPPA_GRID_BITS;
        let at = |j: u64| j as f64 / grid as f64;
        let ok = |j: u64| self.step_factor(at(j), self.peak(at(j))) <= target;
        if !ok(1) {
            return Err(Error::domain(format!(
                "no kappa on the 2^-{KAPPA_GRID_BITS} grid achieves M(kappa) <= {target}"
            )));
        }
        // Invariant: ok(lo), !ok(hi) or hi is past the grid.
        let (mut lo, mut hi) = (1u64, grid);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(lo))
    }

    /// Smallest `C >= 0` with `(c0 + c1 s) kappa^(2s+1) <= eps` for every
    /// `s >= C + 1`.
    pub fn choose_cutoff(&self, kappa: f64, eps: f64) -> Result<usize> {
        open_unit("kappa", kappa)?;
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::domain(format!("eps = {eps} must be positive")));
        }
        let mut s = self.peak(kappa);
        if self.step_factor(kappa, s) <= eps {
            return Ok(0);
        }
        // Past the peak the factors decrease; find the last one above eps.
        while self.step_factor(kappa, s + 1) > eps {
            s += 1;
        }
        Ok(s)
    }
}

/// `M(kappa) = sup_{s >= 0} (s+1) kappa^(2s+1)`.
pub fn big_m(kappa: f64) -> Result<f64> {
    Branching::PERMUTATIONS.sup_step_factor(kappa)
}

/// Largest `kappa` on the `2^-20` grid with `M(kappa) <= target`.
pub fn choose_kappa(target: f64) -> Result<f64> {
    Branching::PERMUTATIONS.choose_kappa(target)
}

/// Smallest `C` with `(s+1) kappa^(2s+1) <= eps` for all `s >= C + 1`.
pub fn choose_cutoff(kappa: f64, eps: f64) -> Result<usize> {
    Branching::PERMUTATIONS.choose_cutoff(kappa, eps)
}

/// Weighted single-step ratio of a state of length `s`, given the frontier
/// growth `m(y) - m(x)` of each child `y` (signed, so broken systems still
/// get a number).
pub fn weighted_ratio(params: &WeightParams, s: usize, frontier_growth: &[i64]) -> f64 {
    if frontier_growth.is_empty() {
        return 0.0;
    }
    let mass: f64 = frontier_growth.iter().map(|&d| params.theta.powi(d as i32)).sum();
    mass * params.kappa.powi((2 * s + 1) as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthStats {
    pub s: usize,
    pub states: u64,
    pub max_ratio: f64,
    /// `(c0 + c1 s) kappa^(2s+1)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub state: String,
    pub s: usize,
    pub ratio: f64,
    pub bound: f64,
}

/// Outcome of a weighted-norm sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theta: f64,
    pub kappa: f64,
    pub branching: Branching,
    /// `M(kappa)`, generalized to the branching constants.
    #[serde(rename = "M_kappa")]
    pub m_kappa: f64,
    /// `1 / M(kappa)`.
    pub r0: f64,
    /// Core states have length `<= cutoff_C`; tail states are longer.
    #[serde(rename = "cutoff_C")]
    pub cutoff_c: usize,
    /// `sup_{s >= C+1}` of the step factor; at most 1/2 by choice of `C`.
    pub tail_bound: f64,
    pub depth: usize,
    pub states_checked: u64,
    pub max_ratio_observed: f64,
    /// `None` when the sweep reached no tail state.
    pub max_tail_ratio: Option<f64>,
    pub per_length: Vec<LengthStats>,
    pub violations: Vec<BoundViolation>,
    /// `max_ratio_observed <= M(kappa)` and no per-state violation.
    pub within_bound: bool,
    /// Every tail ratio is at most 1/2.
    pub tail_contracts: bool,
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn within(x: f64, bound: f64) -> bool {
    x <= bound + TOLERANCE * bound.abs().max(1.0)
}

/// Accumulates per-state ratios during a sweep. Merging is associative and
/// commutative, so parallel sweeps reduce to the same report.
#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    params: WeightParams,
    branching: Branching,
    per_length: Vec<(u64, f64)>,
    violations: Vec<BoundViolation>,
}

impl Sweep {
    pub(crate) fn new(params: WeightParams, branching: Branching, depth: usize) -> Self {
        Sweep {
            params,
            branching,
            per_length: vec![(0, 0.0); depth + 1],
            violations: Vec::new(),
        }
    }

    pub(crate) fn observe(&mut self, s: usize, frontier_growth: &[i64], label: impl FnOnce() -> String) {
        let ratio = weighted_ratio(&self.params, s, frontier_growth);
        if s >= self.per_length.len() {
            self.per_length.resize(s + 1, (0, 0.0));
        }
        let entry = &mut self.per_length[s];
        entry.0 += 1;
        entry.1 = entry.1.max(ratio);
        let bound = self.branching.step_factor(self.params.kappa, s);
        if !within(ratio, bound) {
            self.violations.push(BoundViolation {
                state: label(),
                s,
                ratio,
                bound,
            });
        }
    }

    pub(crate) fn merge(mut self, other: Sweep) -> Sweep {
        if other.per_length.len() > self.per_length.len() {
            self.per_length.resize(other.per_length.len(), (0, 0.0));
        }
        for (a, b) in self.per_length.iter_mut().zip(other.per_length) {
            a.0 += b.0;
            a.1 = a.1.max(b.1);
        }
        self.violations.extend(other.violations);
        self
    }

    pub(crate) fn finish(mut self) -> Result<BoundReport> {
        let kappa = self.params.kappa;
        let m_kappa = self.branching.sup_step_factor(kappa)?;
        let cutoff_c = self.branching.choose_cutoff(kappa, 0.5)?;
        let tail_bound = self.branching.tail_sup(kappa, cutoff_c + 1)?;
        let per_length: Vec<LengthStats> = self
            .per_length
            .iter()
            .enumerate()
            .map(|(s, &(states, max_ratio))| LengthStats {
                s,
                states,
                max_ratio,
                bound: self.branching.step_factor(kappa, s),
            })
            .collect();
        let max_ratio_observed = per_length.iter().map(|l| l.max_ratio).fold(0.0, f64::max);
        let tail: Vec<&LengthStats> = per_length
            .iter()
            .filter(|l| l.s > cutoff_c && l.states > 0)
            .collect();
        let max_tail_ratio = if tail.is_empty() {
            None
        } else {
            Some(tail.iter().map(|l| l.max_ratio).fold(0.0, f64::max))
        };
        self.violations
            .sort_by(|a, b| (a.s, &a.state).cmp(&(b.s, &b.state)));
        Ok(BoundReport {
            theta: self.params.theta,
            kappa,
            branching: self.branching,
            m_kappa,
            r0: 1.0 / m_kappa,
            cutoff_c,
            tail_bound,
            depth: per_length.len() - 1,
            states_checked: per_length.iter().map(|l| l.states).sum(),
            max_ratio_observed,
            max_tail_ratio,
            within_bound: self.violations.is_empty() && within(max_ratio_observed, m_kappa),
            tail_contracts: max_tail_ratio.is_none_or(|t| within(t, 0.5)),
            per_length,
            violations: self.violations,
        })
    }
}

/// Applies the operator to the extremal test function at every state of
/// length `<= depth` and reports the largest weighted ratio, per length and
/// over the tail `s >= C + 1` with `C = choose_cutoff(kappa, 1/2)`.
///
/// Fails with [`Error::LimitExceeded`] if more than `cap` states would be
/// visited.
pub fn verify_norm_bound(v: &Pattern, params: WeightParams, depth: usize, cap: u64) -> Result<BoundReport> {
    let visited = AtomicU64::new(0);
    let split = depth.min(4);
    let roots = crate::engine::states_at_depth(v, 0);
    let mut shallow = Sweep::new(params, Branching::PERMUTATIONS, depth);
    let mut layer = roots;
    for _ in 0..split {
        charge(&visited, layer.len() as u64, cap)?;
        let mut next = Vec::new();
        for x in &layer {
            let children: Vec<State> = x.legal_ranks().into_iter().map(|r| x.step_incremental(v, r)).collect();
            shallow.observe(x.s(), &growth(x, &children), || x.perm().to_string());
            next.extend(children);
        }
        layer = next;
    }
    let deep = layer
        .par_iter()
        .map(|x| {
            let mut sweep = Sweep::new(params, Branching::PERMUTATIONS, depth);
            sweep_subtree(x, v, depth, &mut sweep, &visited, cap)?;
            Ok(sweep)
        })
        .try_reduce(
            || Sweep::new(params, Branching::PERMUTATIONS, depth),
            |a, b| Ok(a.merge(b)),
        )?;
    shallow.merge(deep).finish()
}

fn charge(visited: &AtomicU64, n: u64, cap: u64) -> Result<()> {
    if visited.fetch_add(n, Ordering::Relaxed) + n > cap {
        return Err(Error::limit("states visited", cap));
    }
    Ok(())
}

fn growth(x: &State, children: &[State]) -> Vec<i64> {
    children.iter().map(|y| y.m() as i64 - x.m() as i64).collect()
}

fn sweep_subtree(
    x: &State,
    v: &Pattern,
    depth: usize,
    sweep: &mut Sweep,
    visited: &AtomicU64,
    cap: u64,
) -> Result<()> {
    charge(visited, 1, cap)?;
    let children: Vec<State> = x.legal_ranks().into_iter().map(|r| x.step_incremental(v, r)).collect();
    sweep.observe(x.s(), &growth(x, &children), || x.perm().to_string());
    if x.s() < depth {
        for y in &children {
            sweep_subtree(y, v, depth, sweep, visited, cap)?;
        }
    }
    Ok(())
}

/// Exact counterpart of [`BoundReport`]; every quantity is a rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactBoundReport {
    pub theta: BigRational,
    pub kappa: BigRational,
    pub m_kappa: BigRational,
    pub cutoff_c: usize,
    pub max_ratio_observed: BigRational,
    pub max_tail_ratio: Option<BigRational>,
    pub states_checked: u64,
    /// States whose ratio exceeds `(s+1) kappa^(2s+1)`.
    pub violations: Vec<String>,
}

impl ExactBoundReport {
    pub fn within_bound(&self) -> bool {
        self.violations.is_empty() && self.max_ratio_observed <= self.m_kappa
    }

    pub fn tail_contracts(&self) -> bool {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.max_tail_ratio.as_ref().is_none_or(|t| *t <= half)
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

fn exact_step_factor(kappa: &BigRational, s: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(s + 1)) * Pow::pow(kappa, (2 * s + 1) as u32)
}

/// `M(kappa)` in exact arithmetic; `kappa` must lie in `(0, 1)`.
pub fn big_m_exact(kappa: &BigRational) -> Result<BigRational> {
    if *kappa <= BigRational::zero() || *kappa >= BigRational::one() {
        return Err(Error::domain(format!("kappa = {kappa} must lie strictly between 0 and 1")));
    }
    let mut s = 0;
    while exact_step_factor(kappa, s + 1) > exact_step_factor(kappa, s) {
        s += 1;
    }
    Ok(exact_step_factor(kappa, s))
}

/// The sweep of [`verify_norm_bound`] in exact rational arithmetic.
/// `theta` and `kappa` are taken at their exact binary values. Single
/// threaded; meant for small depths.
pub fn verify_norm_bound_exact(
    v: &Pattern,
    params: WeightParams,
    depth: usize,
    cap: u64,
) -> Result<ExactBoundReport> {
    let theta = exact(params.theta);
    let kappa = exact(params.kappa);
    let m_kappa = big_m_exact(&kappa)?;
    let cutoff_c = choose_cutoff(params.kappa, 0.5)?;
    let mut report = ExactBoundReport {
        theta: theta.clone(),
        kappa: kappa.clone(),
        m_kappa,
        cutoff_c,
        max_ratio_observed: BigRational::zero(),
        max_tail_ratio: None,
        states_checked: 0,
        violations: Vec::new(),
    };
    let mut stack = vec![State::root()];
    while let Some(x) = stack.pop() {
        report.states_checked += 1;
        if report.states_checked > cap {
            return Err(Error::limit("states visited", cap));
        }
        let s = x.s();
        let children: Vec<State> = x.legal_ranks().into_iter().map(|r| x.step_incremental(v, r)).collect();
        let mass: BigRational = children
            .iter()
            .map(|y| Pow::pow(&theta, (y.m() - x.m()) as u32))
            .fold(BigRational::zero(), |a, b| a + b);
        let ratio = mass * Pow::pow(&kappa, (2 * s + 1) as u32);
        if ratio > exact_step_factor(&kappa, s) {
            report.violations.push(x.perm().to_string());
        }
        if s > cutoff_c && report.max_tail_ratio.as_ref().is_none_or(|t| ratio > *t) {
            report.max_tail_ratio = Some(ratio.clone());
        }
        if ratio > report.max_ratio_observed {
            report.max_ratio_observed = ratio;
        }
        if s < depth {
            stack.extend(children);
        }
    }
    Ok(report)
}

/// One row of [`growth_estimates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub n: usize,
    /// `a_n^(1/n)`.
    pub root_estimate: f64,
    /// `a_n / a_(n-1)`; `None` when `a_(n-1) = 0`.
    pub ratio_estimate: Option<f64>,
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `a_n^(1/n)` and `a_n / a_(n-1)` for every `n >= 1` with `a_n > 0`.
pub fn growth_estimates(table: &CountTable) -> Result<Vec<GrowthEstimate>> {
    let counts = table.counts();
    if counts.len() < 2 {
        return Err(Error::domain("growth estimates need at least a_0 and a_1"));
    }
    Ok((1..counts.len())
        .filter(|&n| !counts[n].is_zero())
        .map(|n| {
            let ratio_estimate = (!counts[n - 1].is_zero()).then(|| {
                BigRational::new(BigInt::from(counts[n].clone()), BigInt::from(counts[n - 1].clone()))
                    .to_f64()
                    .expect("finite ratio")
            });
            GrowthEstimate {
                n,
                root_estimate: (ln_big(&counts[n]) / n as f64).exp(),
                ratio_estimate,
            }
        })
        .collect())
}

/// CSV `n,root_estimate,ratio_estimate` with 12 significant digits.
pub fn growth_csv(rows: &[GrowthEstimate]) -> String {
    let mut out = String::from("n,root_estimate,ratio_estimate\n");
    for row in rows {
        let ratio = row.ratio_estimate.map(sig12).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", row.n, sig12(row.root_estimate), ratio));
    }
    out
}

/// `printf("%.12g")`.
pub fn sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
