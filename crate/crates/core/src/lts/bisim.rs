//! Strong bisimulation by signature-based partition refinement.
//!
//! Both systems are placed side by side and refined together. Level `k` of
//! the refinement is `k`-step bisimilarity, and the levels are kept so that a
//! distinguishing trace can be read back from the first level at which two
//! states split.

use std::collections::{BTreeMap, HashMap};

use super::Lts;
use crate::chor::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// After the trace minus its last label, `side` can take the last label and
    /// the other system cannot match it at all.
    MissingStep { side: Side },
    /// After the trace, exactly one of the two systems may terminate.
    TerminationMismatch { terminating: Side },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub trace: Vec<Action>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimReport {
    pub bisimilar: bool,
    /// Pairs `(left state, right state)` in the same class; empty when not bisimilar.
    pub relation: Vec<(usize, usize)>,
    pub witness: Option<Witness>,
}

/// The two systems as one graph: left states first, then right states.
struct Union {
    offset: usize,
    labels: Vec<Action>,
    succ: Vec<Vec<(u32, usize)>>,
    terminating: Vec<bool>,
    explored: Vec<bool>,
}

impl Union {
    fn new(left: &Lts, right: &Lts) -> Self {
        let mut ids: BTreeMap<Action, u32> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut succ = Vec::new();
        let mut terminating = Vec::new();
        let mut explored = Vec::new();
        for (lts, offset) in [(left, 0), (right, left.state_count())] {
            for s in 0..lts.state_count() {
                let out = lts
                    .successors(s)
                    .iter()
                    .map(|(a, t)| {
                        let id = *ids.entry(a.clone()).or_insert_with(|| {
                            labels.push(a.clone());
                            labels.len() as u32 - 1
                        });
                        (id, t + offset)
                    })
                    .collect();
                succ.push(out);
                terminating.push(lts.is_terminating(s));
                explored.push(lts.is_explored(s));
            }
        }
        Union { offset: left.state_count(), labels, succ, terminating, explored }
    }

    fn offset(&self) -> usize {
        self.offset
    }

    /// One refinement round. `None` entries are states whose class at this
    /// level is unknown because some successor was never explored.
    fn refine(&self, prev: &[Option<u32>]) -> Vec<Option<u32>> {
        let mut ids: HashMap<(u32, Vec<(u32, u32)>), u32> = HashMap::new();
        (0..self.succ.len())
            .map(|s| {
                let own = prev[s]?;
                if !self.explored[s] {
                    return None;
                }
                let mut sig = Vec::with_capacity(self.succ[s].len());
                for (a, t) in &self.succ[s] {
                    sig.push((*a, prev[*t]?));
                }
                sig.sort_unstable();
                sig.dedup();
                let next = ids.len() as u32;
                Some(*ids.entry((own, sig)).or_insert(next))
            })
            .collect()
    }

    fn initial_level(&self) -> Vec<Option<u32>> {
        self.terminating.iter().map(|t| Some(*t as u32)).collect()
    }
}

fn class_count(level: &[Option<u32>]) -> usize {
    let mut seen: Vec<u32> = level.iter().flatten().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Decides strong bisimilarity of the initial states of two finite systems,
/// with termination as an observable.
pub fn bisimilar(left: &Lts, right: &Lts) -> BisimReport {
    assert!(left.is_complete() && right.is_complete(), "bisimilar needs fully explored systems");
    let u = Union::new(left, right);
    let mut levels = vec![u.initial_level()];
    loop {
        let next = u.refine(levels.last().expect("non-empty"));
        let stable = class_count(&next) == class_count(levels.last().expect("non-empty"));
        levels.push(next);
        if stable {
            break;
        }
    }
    let last = levels.last().expect("non-empty");
    let (l0, r0) = (left.initial(), right.initial() + u.offset());
    if last[l0] == last[r0] {
        let mut by_class: HashMap<u32, Vec<usize>> = HashMap::new();
        for (s, class) in last.iter().enumerate().take(left.state_count()) {
            by_class.entry(class.expect("explored")).or_default().push(s);
        }
        let mut relation = Vec::new();
        for s in 0..right.state_count() {
            if let Some(ls) = by_class.get(&last[s + u.offset()].expect("explored")) {
                relation.extend(ls.iter().map(|l| (*l, s)));
            }
        }
        relation.sort_unstable();
        return BisimReport { bisimilar: true, relation, witness: None };
    }
    let witness = extract_witness(&u, &levels, l0, r0);
    BisimReport { bisimilar: false, relation: Vec::new(), witness: Some(witness) }
}

fn split_level(levels: &[Vec<Option<u32>>], p: usize, q: usize) -> usize {
    levels.iter().position(|lv| lv[p] != lv[q]).unwrap_or(levels.len())
}

fn extract_witness(u: &Union, levels: &[Vec<Option<u32>>], mut p: usize, mut q: usize) -> Witness {
    // Invariant: p is a left state, q a right state, split at level k.
    let mut trace = Vec::new();
    loop {
        let k = split_level(levels, p, q);
        if k == 0 {
            let terminating = if u.terminating[p] { Side::Left } else { Side::Right };
            return Witness { trace, verdict: Verdict::TerminationMismatch { terminating } };
        }
        let prev = &levels[k - 1];
        let unmatched = |from: usize, other: usize| {
            u.succ[from].iter().find_map(|(a, t)| {
                let answers: Vec<usize> = u.succ[other].iter().filter(|(b, _)| b == a).map(|(_, x)| *x).collect();
                (!answers.iter().any(|x| prev[*x] == prev[*t])).then_some((*a, *t, answers))
            })
        };
        let (side, (label, moved, answers)) = match unmatched(p, q) {
            Some(found) => (Side::Left, found),
            None => (Side::Right, unmatched(q, p).expect("states split at this level")),
        };
        trace.push(u.labels[label as usize].clone());
        if answers.is_empty() {
            return Witness { trace, verdict: Verdict::MissingStep { side } };
        }
        // Follow the answer that stays equivalent the longest.
        let best = *answers.iter().max_by_key(|x| split_level(levels, moved, **x)).expect("non-empty");
        (p, q) = match side {
            Side::Left => (moved, best),
            Side::Right => (best, moved),
        };
    }
}

/// `depth`-step bisimilarity of the initial states. Works on depth-bounded
/// explorations: both systems must be explored at least `depth` steps deep.
pub fn bounded_bisimilar(left: &Lts, right: &Lts, depth: usize) -> bool {
    let u = Union::new(left, right);
    let mut level = u.initial_level();
    for _ in 0..depth {
        level = u.refine(&level);
    }
    let (l0, r0) = (left.initial(), right.initial() + u.offset());
    match (level[l0], level[r0]) {
        (Some(a), Some(b)) => a == b,
        _ => panic!("systems not explored {depth} steps deep"),
    }
}
