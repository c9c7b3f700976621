use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::Lts;
use crate::chor::Action;

type StateSet = BTreeSet<usize>;

fn step(lts: &Lts, from: &StateSet) -> BTreeMap<Action, StateSet> {
    let mut out: BTreeMap<Action, StateSet> = BTreeMap::new();
    for s in from {
        for (a, t) in lts.successors(*s) {
            out.entry(a.clone()).or_default().insert(*t);
        }
    }
    out
}

/// Bounded language equivalence: the same completed traces and the same
/// prefixes, for all traces of length at most `max_len`.
pub fn trace_equivalent(left: &Lts, right: &Lts, max_len: usize) -> bool {
    let start: (StateSet, StateSet) = ([left.initial()].into(), [right.initial()].into());
    let mut seen: HashSet<(StateSet, StateSet)> = HashSet::new();
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some(((l, r), depth)) = queue.pop_front() {
        if !seen.insert((l.clone(), r.clone())) {
            continue;
        }
        let done = |lts: &Lts, set: &StateSet| set.iter().any(|s| lts.is_terminating(*s));
        if done(left, &l) != done(right, &r) {
            return false;
        }
        if depth == max_len {
            continue;
        }
        let (ls, rs) = (step(left, &l), step(right, &r));
        if !ls.keys().eq(rs.keys()) {
            return false;
        }
        for ((_, l2), (_, r2)) in ls.into_iter().zip(rs) {
            queue.push_back(((l2, r2), depth + 1));
        }
    }
    true
}

/// Label sequences of length at most `max_len` that end in a terminating state.
pub fn completed_traces(lts: &Lts, max_len: usize) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    let mut prefix = Vec::new();
    walk(lts, lts.initial(), max_len, &mut prefix, &mut out);
    out
}

fn walk(lts: &Lts, s: usize, budget: usize, prefix: &mut Vec<Action>, out: &mut BTreeSet<Vec<Action>>) {
    if lts.is_terminating(s) {
        out.insert(prefix.clone());
    }
    if budget == 0 {
        return;
    }
    for (a, t) in lts.successors(s) {
        prefix.push(a.clone());
        walk(lts, *t, budget - 1, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chor::parse;
    use crate::lts::{build_chor_lts, build_pom_lts, DEFAULT_STATE_BOUND};
    use crate::pomset::tests::{encoded, MW};

    fn lts(s: &str) -> Lts {
        build_chor_lts(&parse(s, true).unwrap(), DEFAULT_STATE_BOUND).unwrap()
    }

    #[test]
    fn early_and_late_choice_are_trace_equivalent() {
        let (l, r) = (lts("a->b:x ; (b->a:x + b->a:y)"), lts("(a->b:x ; b->a:x) + (a->b:x ; b->a:y)"));
        for n in 0..8 {
            assert!(trace_equivalent(&l, &r, n));
        }
    }

    #[test]
    fn different_first_step() {
        let (l, r) = (lts("a->b:x"), lts("a->c:x"));
        assert!(trace_equivalent(&l, &r, 0));
        assert!(!trace_equivalent(&l, &r, 1));
    }

    #[test]
    fn reflexive() {
        let l = lts(MW);
        assert!(trace_equivalent(&l, &l, 10));
    }

    #[test]
    fn completed_trace_counts() {
        assert_eq!(completed_traces(&lts(MW), 8).len(), 70);
        assert_eq!(completed_traces(&lts(MW), 7).len(), 0);
        assert_eq!(completed_traces(&lts("0"), 3), [vec![]].into());
        let pom = build_pom_lts(&encoded(MW), DEFAULT_STATE_BOUND).unwrap();
        assert_eq!(completed_traces(&pom, 8).len(), 70);
    }
}
