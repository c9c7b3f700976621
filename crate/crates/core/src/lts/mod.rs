//! Explicit labelled transition systems generated from either semantics.

mod bisim;
mod traces;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::Serialize;
use thiserror::Error;

use crate::chor::{Action, Choreography};
use crate::pomset::{fire, BranchingPomset};
use crate::semantics;

pub use bisim::{bisimilar, bounded_bisimilar, BisimReport, Side, Verdict, Witness};
pub use traces::{completed_traces, trace_equivalent};

/// Default cap on explored states.
pub const DEFAULT_STATE_BOUND: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("state space exceeded {bound} states")]
pub struct Exploded {
    pub bound: usize,
}

/// States are indexed densely; index 0 is the initial state unless built by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    states: Vec<String>,
    initial: usize,
    succ: Vec<Vec<(Action, usize)>>,
    terminating: BTreeSet<usize>,
    /// States whose successors were not computed (depth-bounded exploration).
    unexplored: BTreeSet<usize>,
}

impl Lts {
    /// Builds an LTS from raw parts. Panics when an index is out of range.
    pub fn from_parts(
        states: Vec<String>,
        initial: usize,
        transitions: impl IntoIterator<Item = (usize, Action, usize)>,
        terminating: BTreeSet<usize>,
    ) -> Lts {
        let n = states.len();
        assert!(initial < n, "initial state out of range");
        let mut succ = vec![Vec::new(); n];
        for (s, a, t) in transitions {
            assert!(s < n && t < n, "transition endpoint out of range");
            succ[s].push((a, t));
        }
        for out in &mut succ {
            out.sort();
            out.dedup();
        }
        assert!(terminating.iter().all(|s| *s < n), "terminating state out of range");
        Lts { states, initial, succ, terminating, unexplored: BTreeSet::new() }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_dump(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn successors(&self, s: usize) -> &[(Action, usize)] {
        &self.succ[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &Action, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(s, out)| out.iter().map(move |(a, t)| (s, a, *t)))
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_terminating(&self, s: usize) -> bool {
        self.terminating.contains(&s)
    }

    pub fn terminating(&self) -> &BTreeSet<usize> {
        &self.terminating
    }

    pub fn is_explored(&self, s: usize) -> bool {
        !self.unexplored.contains(&s)
    }

    pub fn is_complete(&self) -> bool {
        self.unexplored.is_empty()
    }

    /// The same system with states renumbered by `perm` (old index → new index).
    pub fn permuted(&self, perm: &[usize]) -> Lts {
        assert_eq!(perm.len(), self.states.len());
        let mut states = vec![String::new(); perm.len()];
        for (old, new) in perm.iter().enumerate() {
            states[*new] = self.states[old].clone();
        }
        let transitions: Vec<_> = self.transitions().map(|(s, a, t)| (perm[s], a.clone(), perm[t])).collect();
        let mut out = Lts::from_parts(
            states,
            perm[self.initial],
            transitions,
            self.terminating.iter().map(|s| perm[*s]).collect(),
        );
        out.unexplored = self.unexplored.iter().map(|s| perm[*s]).collect();
        out
    }

    /// Breadth-first exploration from `initial`. With `max_depth`, states at
    /// that distance are kept but not expanded.
    pub fn explore<S, F, T, D>(
        initial: S,
        bound: usize,
        max_depth: Option<usize>,
        mut successors: F,
        mut terminates: T,
        mut dump: D,
    ) -> Result<Lts, Exploded>
    where
        S: Clone + Eq + Hash,
        F: FnMut(&S) -> Vec<(Action, S)>,
        T: FnMut(&S) -> bool,
        D: FnMut(&S) -> String,
    {
        let mut index: HashMap<S, usize> = HashMap::new();
        let mut keys: Vec<S> = Vec::new();
        let mut depth: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(initial.clone(), 0);
        keys.push(initial);
        depth.push(0);
        queue.push_back(0);
        let mut succ: Vec<Vec<(Action, usize)>> = vec![Vec::new()];
        let mut unexplored = BTreeSet::new();
        while let Some(s) = queue.pop_front() {
            if max_depth.is_some_and(|d| depth[s] >= d) {
                unexplored.insert(s);
                continue;
            }
            let key = keys[s].clone();
            let mut out = Vec::new();
            for (label, target) in successors(&key) {
                let t = match index.get(&target) {
                    Some(t) => *t,
                    None => {
                        if keys.len() >= bound {
                            return Err(Exploded { bound });
                        }
                        let t = keys.len();
                        index.insert(target.clone(), t);
                        keys.push(target);
                        depth.push(depth[s] + 1);
                        succ.push(Vec::new());
                        queue.push_back(t);
                        t
                    }
                };
                out.push((label, t));
            }
            out.sort();
            out.dedup();
            succ[s] = out;
        }
        let terminating = keys.iter().enumerate().filter(|(_, k)| terminates(k)).map(|(i, _)| i).collect();
        let states = keys.iter().map(&mut dump).collect();
        Ok(Lts { states, initial: 0, succ, terminating, unexplored })
    }
}

fn chor_successors(c: &Choreography) -> Vec<(Action, Choreography)> {
    semantics::steps(c).into_iter().map(|s| (s.label, s.target)).collect()
}

/// The reachable part of the choreography semantics; states are terms.
pub fn build_chor_lts(c: &Choreography, bound: usize) -> Result<Lts, Exploded> {
    Lts::explore(c.clone(), bound, None, chor_successors, semantics::terminates, |c| c.to_string())
}

/// Like [`build_chor_lts`] but stops expanding at `depth` steps from `c`.
pub fn build_chor_lts_to_depth(c: &Choreography, depth: usize, bound: usize) -> Result<Lts, Exploded> {
    Lts::explore(c.clone(), bound, Some(depth), chor_successors, semantics::terminates, |c| c.to_string())
}

/// Label-level firing successors of a pomset.
pub fn pomset_successors(r: &BranchingPomset) -> Vec<(Action, BranchingPomset)> {
    r.events()
        .iter()
        .filter_map(|e| fire(r, *e).ok().map(|next| (r.label(*e).expect("labelled").clone(), next)))
        .collect()
}

/// The reachable part of the pomset semantics. Event ids are stable across
/// firings, so residual pomsets are compared structurally.
pub fn build_pom_lts(r: &BranchingPomset, bound: usize) -> Result<Lts, Exploded> {
    Lts::explore(r.clone(), bound, None, pomset_successors, BranchingPomset::terminates, pomset_dump)
}

fn pomset_dump(r: &BranchingPomset) -> String {
    use crate::pomset::{BranchNode, Child};
    fn node(r: &BranchingPomset, n: &BranchNode, out: &mut String) {
        out.push('{');
        for (i, c) in n.children.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            match c {
                Child::Event(e) => out.push_str(&format!("{}:{}", e, r.label(*e).expect("labelled"))),
                Child::Choice(a, b) => {
                    out.push('[');
                    node(r, a, out);
                    out.push_str(" | ");
                    node(r, b, out);
                    out.push(']');
                }
            }
        }
        out.push('}');
    }
    let mut out = String::new();
    node(r, r.branching(), &mut out);
    out
}

/// `{ "states": [..], "initial": n, "transitions": [[s, label, t], ..], "terminating": [..] }`
impl Serialize for Lts {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Transitions<'a>(&'a Lts);
        impl Serialize for Transitions<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.transition_count()))?;
                for (s, a, t) in self.0.transitions() {
                    seq.serialize_element(&(s, a, t))?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("Lts", 4)?;
        st.serialize_field("states", &self.states)?;
        st.serialize_field("initial", &self.initial)?;
        st.serialize_field("transitions", &Transitions(self))?;
        st.serialize_field("terminating", &self.terminating)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chor::parse;
    use crate::encode::{encode, EncodeConfig};
    use crate::pomset::tests::{encoded, MW};

    fn chor(s: &str) -> Choreography {
        parse(s, true).unwrap()
    }

    #[test]
    fn master_workers_has_twenty_five_states() {
        let lts = build_chor_lts(&chor(MW), DEFAULT_STATE_BOUND).unwrap();
        assert_eq!(lts.state_count(), 25);
        let pom = build_pom_lts(&encoded(MW), DEFAULT_STATE_BOUND).unwrap();
        assert_eq!(pom.state_count(), 25);
    }

    #[test]
    fn skip_is_one_terminating_state() {
        let lts = build_chor_lts(&Choreography::Skip, 10).unwrap();
        assert_eq!(lts.state_count(), 1);
        assert!(lts.is_terminating(0));
        assert_eq!(lts.transition_count(), 0);
        let pom = build_pom_lts(&BranchingPomset::empty(), 10).unwrap();
        assert_eq!((pom.state_count(), pom.is_terminating(0)), (1, true));
    }

    #[test]
    fn single_interaction_has_three_states() {
        let lts = build_chor_lts(&chor("a->b:x"), 10).unwrap();
        assert_eq!(lts.state_count(), 3);
        assert_eq!(lts.state_dump(1), "a b?x");
        assert_eq!(lts.terminating(), &[2].into());
    }

    #[test]
    fn bound_is_enforced() {
        assert_eq!(build_chor_lts(&chor(MW), 10), Err(Exploded { bound: 10 }));
    }

    #[test]
    fn depth_bounded_exploration_of_loops() {
        let lts = build_chor_lts_to_depth(&chor("(a->b:x)*"), 4, 1000).unwrap();
        assert!(!lts.is_complete());
        assert!(lts.is_explored(0));
    }

    #[test]
    fn json_dump_shape() {
        let lts = build_chor_lts(&chor("a->b:x"), 10).unwrap();
        let v = serde_json::to_value(&lts).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "states": ["a->b:x", "a b?x", "0"],
                "initial": 0,
                "transitions": [
                    [0, {"kind": "send", "from": "a", "to": "b", "msg": "x"}, 1],
                    [1, {"kind": "recv", "from": "a", "to": "b", "msg": "x"}, 2]
                ],
                "terminating": [2]
            })
        );
    }

    #[test]
    fn permutation_keeps_structure() {
        let pom = build_pom_lts(&encode(&chor("a->b:x || c->d:y"), &EncodeConfig::default()).unwrap(), 100).unwrap();
        let n = pom.state_count();
        let perm: Vec<usize> = (0..n).rev().collect();
        let p = pom.permuted(&perm);
        assert_eq!(p.initial(), n - 1);
        assert_eq!(p.transition_count(), pom.transition_count());
    }
}
