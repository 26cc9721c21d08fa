//! Right-visible growth systems.
//!
//! A system has a root state, a length and a complexity on states, and for
//! each state a finite set of extensions, each producing a new state. The
//! hypotheses are:
//!
//! * RV1: finitely many states of each bounded length;
//! * RV2: every extension increases the length by exactly one;
//! * RV3: complexity never decreases along an extension;
//! * RV4: `|extensions(x)| <= c0 + c1 * length(x)`.
//!
//! Under these, legal-history counts grow at most exponentially. This module
//! counts histories generically, checks the hypotheses on finite
//! truncations, and evaluates the weighted single-step estimate with the
//! declared branching constants. Two instances ship: pattern avoidance by
//! right insertion and walks in a strip of fixed width.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::analysis::{BoundReport, Branching, Sweep, WeightParams};
use crate::error::{Error, Result};
use crate::frontier::{FrontierMode, State};
use crate::perm::Pattern;

pub trait GrowthSystem {
    type State: Clone + fmt::Debug;
    /// Opaque to the framework.
    type Extension: Clone + fmt::Debug;

    fn root(&self) -> Self::State;
    fn length(&self, x: &Self::State) -> usize;
    fn complexity(&self, x: &Self::State) -> usize;
    fn extensions(&self, x: &Self::State) -> Vec<Self::Extension>;
    fn apply(&self, x: &Self::State, r: &Self::Extension) -> Self::State;
    /// Declared constants for RV4. Checked, never inferred.
    fn branching(&self) -> Branching;

    fn describe(&self, x: &Self::State) -> String {
        format!("{x:?}")
    }
}

/// `a_0, ..., a_N`: the number of legal histories of each length from the
/// root.
pub fn count_histories<S: GrowthSystem>(sys: &S, n_max: usize, cap: u64) -> Result<Vec<BigUint>> {
    let mut counts = vec![0u64; n_max + 1];
    let mut visited = 0u64;
    let mut stack = vec![(sys.root(), 0usize)];
    while let Some((x, depth)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::limit("states visited", cap));
        }
        counts[depth] += 1;
        if depth < n_max {
            stack.extend(sys.extensions(&x).iter().map(|r| (sys.apply(&x, r), depth + 1)));
        }
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// Same numbers as [`count_histories`], computed by pushing a measure on
/// states forward one extension at a time and merging equal states. Memory
/// is the number of distinct states per length instead of the number of
/// histories, which is what makes long strip walks cheap. `cap` bounds the
/// support size of each iterate.
pub fn count_histories_merged<S>(sys: &S, n_max: usize, cap: u64) -> Result<Vec<BigUint>>
where
    S: GrowthSystem,
    S::State: Eq + Hash,
{
    let mut measure: HashMap<S::State, BigUint> = HashMap::new();
    measure.insert(sys.root(), BigUint::one());
    let mut counts = vec![BigUint::one()];
    for _ in 0..n_max {
        let mut next: HashMap<S::State, BigUint> = HashMap::new();
        for (x, c) in &measure {
            for r in sys.extensions(x) {
                *next.entry(sys.apply(x, &r)).or_default() += c;
            }
        }
        if next.len() as u64 > cap {
            return Err(Error::limit("measure support size", cap));
        }
        counts.push(next.values().sum());
        measure = next;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    RV2,
    RV3,
    RV4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub state: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub depth: usize,
    pub branching: Branching,
    /// Reachable states per history length; finite by termination (RV1).
    pub states_per_depth: Vec<u64>,
    pub states_checked: u64,
    /// States with no extension at all.
    pub dead_ends: u64,
    /// Largest `|extensions(x)| - (c0 + c1 s)` seen; at most zero when RV4
    /// holds.
    pub max_branching_excess: i64,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks RV2 through RV4 on every state reachable by a history of length
/// at most `depth`.
pub fn check_axioms<S: GrowthSystem>(sys: &S, depth: usize, cap: u64) -> Result<AxiomReport> {
    let branching = sys.branching();
    let mut report = AxiomReport {
        depth,
        branching,
        states_per_depth: vec![0; depth + 1],
        states_checked: 0,
        dead_ends: 0,
        max_branching_excess: i64::MIN,
        violations: Vec::new(),
    };
    let mut stack = vec![(sys.root(), 0usize)];
    while let Some((x, d)) = stack.pop() {
        report.states_checked += 1;
        if report.states_checked > cap {
            return Err(Error::limit("states visited", cap));
        }
        report.states_per_depth[d] += 1;
        let s = sys.length(&x);
        let m = sys.complexity(&x);
        let exts = sys.extensions(&x);
        if exts.is_empty() {
            report.dead_ends += 1;
        }
        let excess = exts.len() as i64 - branching.at(s) as i64;
        report.max_branching_excess = report.max_branching_excess.max(excess);
        if excess > 0 {
            report.violations.push(AxiomViolation {
                axiom: Axiom::RV4,
                state: sys.describe(&x),
                detail: format!("{} extensions at length {s}, bound {}", exts.len(), branching.at(s)),
            });
        }
        for r in &exts {
            let y = sys.apply(&x, r);
            let (sy, my) = (sys.length(&y), sys.complexity(&y));
            if sy != s + 1 {
                report.violations.push(AxiomViolation {
                    axiom: Axiom::RV2,
                    state: sys.describe(&x),
                    detail: format!("extension {r:?} goes from length {s} to {sy}"),
                });
            }
            if my < m {
                report.violations.push(AxiomViolation {
                    axiom: Axiom::RV3,
                    state: sys.describe(&x),
                    detail: format!("extension {r:?} drops complexity from {m} to {my}"),
                });
            }
            if d < depth {
                stack.push((y, d + 1));
            }
        }
    }
    Ok(report)
}

/// Weighted single-step ratios on all states reachable within `depth`
/// steps, compared against `(c0 + c1 s) kappa^(2s+1)`.
pub fn generic_bound_report<S: GrowthSystem>(
    sys: &S,
    params: WeightParams,
    depth: usize,
    cap: u64,
) -> Result<BoundReport> {
    let mut sweep = Sweep::new(params, sys.branching(), depth);
    let mut visited = 0u64;
    let mut stack = vec![(sys.root(), 0usize)];
    while let Some((x, d)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::limit("states visited", cap));
        }
        let m = sys.complexity(&x) as i64;
        let children: Vec<S::State> = sys.extensions(&x).iter().map(|r| sys.apply(&x, r)).collect();
        let growth: Vec<i64> = children.iter().map(|y| sys.complexity(y) as i64 - m).collect();
        sweep.observe(sys.length(&x), &growth, || sys.describe(&x));
        if d < depth {
            stack.extend(children.into_iter().map(|y| (y, d + 1)));
        }
    }
    sweep.finish()
}

/// Pattern avoidance by right insertion: states carry their frontier,
/// complexity is the frontier size, extensions are the legal ranks.
#[derive(Debug, Clone)]
pub struct PatternSystem {
    pattern: Pattern,
    mode: FrontierMode,
}

impl PatternSystem {
    pub fn new(pattern: Pattern) -> Self {
        PatternSystem {
            pattern,
            mode: FrontierMode::Recompute,
        }
    }

    pub fn with_mode(pattern: Pattern, mode: FrontierMode) -> Self {
        PatternSystem { pattern, mode }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }
}

impl GrowthSystem for PatternSystem {
    type State = State;
    type Extension = usize;

    fn root(&self) -> State {
        State::root()
    }

    fn length(&self, x: &State) -> usize {
        x.s()
    }

    fn complexity(&self, x: &State) -> usize {
        x.m()
    }

    fn extensions(&self, x: &State) -> Vec<usize> {
        x.legal_ranks()
    }

    fn apply(&self, x: &State, r: &usize) -> State {
        x.step_with(&self.pattern, *r, self.mode)
            .expect("extensions are legal ranks")
    }

    fn branching(&self) -> Branching {
        Branching::PERMUTATIONS
    }

    fn describe(&self, x: &State) -> String {
        x.perm().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Up,
    Down,
    Stay,
}

impl Step {
    pub fn delta(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
            Step::Stay => 0,
        }
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "up" => Ok(Step::Up),
            "down" => Ok(Step::Down),
            "stay" => Ok(Step::Stay),
            other => Err(Error::domain(format!("unknown step {other:?}; expected up, down or stay"))),
        }
    }
}

/// Parses a comma-separated step list such as `up,down,stay`.
pub fn parse_steps(s: &str) -> Result<Vec<Step>> {
    s.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StripWalkState {
    pub width: usize,
    /// In `1..=width`.
    pub height: usize,
    pub steps_taken: usize,
}

/// Walks on heights `1..=width` starting at height 1. Steps that would
/// leave the strip are not offered as extensions. Complexity is constant
/// zero and branching is bounded by the number of distinct steps.
#[derive(Debug, Clone)]
pub struct StripWalk {
    width: usize,
    steps: Vec<Step>,
}

impl StripWalk {
    pub fn new(width: usize, steps: impl IntoIterator<Item = Step>) -> Result<Self> {
        if width == 0 {
            return Err(Error::domain("strip width must be at least 1"));
        }
        let mut steps: Vec<Step> = steps.into_iter().collect();
        steps.sort();
        steps.dedup();
        if steps.is_empty() {
            return Err(Error::domain("strip walk needs at least one step"));
        }
        Ok(StripWalk { width, steps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }
}

impl GrowthSystem for StripWalk {
    type State = StripWalkState;
    type Extension = Step;

    fn root(&self) -> StripWalkState {
        StripWalkState {
            width: self.width,
            height: 1,
            steps_taken: 0,
        }
    }

    fn length(&self, x: &StripWalkState) -> usize {
        x.steps_taken
    }

    fn complexity(&self, _: &StripWalkState) -> usize {
        0
    }

    fn extensions(&self, x: &StripWalkState) -> Vec<Step> {
        self.steps
            .iter()
            .copied()
            .filter(|st| {
                let h = x.height as i64 + st.delta();
                h >= 1 && h <= self.width as i64
            })
            .collect()
    }

    fn apply(&self, x: &StripWalkState, r: &Step) -> StripWalkState {
        StripWalkState {
            width: x.width,
            height: (x.height as i64 + r.delta()) as usize,
            steps_taken: x.steps_taken + 1,
        }
    }

    fn branching(&self) -> Branching {
        Branching::new(self.steps.len() as u64, 0)
    }

    fn describe(&self, x: &StripWalkState) -> String {
        format!("height {} after {} steps", x.height, x.steps_taken)
    }
}
