//! Branching pomsets: labelled events, a direct dependency relation and a
//! tree of binary choices over the events.
//!
//! The dependency relation is stored as given (its generating pairs), never
//! closed transitively. Restricting a closed relation to the surviving events
//! would keep orderings that only held through discarded events.

mod dot;
mod enable;
mod json;
mod linear;
mod refine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::chor::Action;

pub use dot::to_dot;
pub use enable::{enable, enabled_events, fire, CannotEnable};
pub use json::PomsetJsonError;
pub use linear::{linearisations, Linearisations};
pub use refine::{
    all_refinements, complete_resolutions, enabling_refinements, maximal_enabling_refinements,
    node_refinements, refines, BudgetExceeded, DEFAULT_LEAF_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A child of a branching node: a bare event or a binary choice.
///
/// The two branches of a choice form an unordered pair; [`Child::choice`]
/// stores them in canonical order so that structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Child {
    Event(EventId),
    Choice(Box<BranchNode>, Box<BranchNode>),
}

impl Child {
    pub fn choice(a: BranchNode, b: BranchNode) -> Child {
        if a <= b {
            Child::Choice(Box::new(a), Box::new(b))
        } else {
            Child::Choice(Box::new(b), Box::new(a))
        }
    }
}

/// A node of the branching structure: a set of children.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchNode {
    pub children: BTreeSet<Child>,
}

impl BranchNode {
    pub fn empty() -> Self {
        BranchNode::default()
    }

    pub fn new(children: impl IntoIterator<Item = Child>) -> Self {
        BranchNode { children: children.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in tree order. Duplicates are kept so that validation can see them.
    pub fn leaves(&self) -> Vec<EventId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<EventId>) {
        for child in &self.children {
            match child {
                Child::Event(e) => out.push(*e),
                Child::Choice(l, r) => {
                    l.collect_leaves(out);
                    r.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaf_set(&self) -> BTreeSet<EventId> {
        self.leaves().into_iter().collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn choice_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                Child::Event(_) => 0,
                Child::Choice(l, r) => 1 + l.choice_count() + r.choice_count(),
            })
            .sum()
    }

    pub fn contains_event(&self, e: EventId) -> bool {
        self.children.iter().any(|c| match c {
            Child::Event(x) => *x == e,
            Child::Choice(l, r) => l.contains_event(e) || r.contains_event(e),
        })
    }

    pub fn has_direct_event(&self, e: EventId) -> bool {
        self.children.contains(&Child::Event(e))
    }

    /// `B - e`: drops `e` where it is a direct child, otherwise recurses.
    pub fn without_event(&self, e: EventId) -> BranchNode {
        if self.has_direct_event(e) {
            let mut out = self.clone();
            out.children.remove(&Child::Event(e));
            return out;
        }
        BranchNode::new(self.children.iter().map(|c| match c {
            Child::Event(x) => Child::Event(*x),
            Child::Choice(l, r) => Child::choice(l.without_event(e), r.without_event(e)),
        }))
    }

    /// Whether the structure refines to the empty set: no bare event, and every
    /// choice has a branch that itself refines to the empty set.
    pub fn refines_to_empty(&self) -> bool {
        self.children.iter().all(|c| match c {
            Child::Event(_) => false,
            Child::Choice(l, r) => l.refines_to_empty() || r.refines_to_empty(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("an event occurs more than once")]
    DuplicateEvent,
    #[error("the leaves of the branching structure differ from the event set")]
    LeafMismatch,
    #[error("the dependency relation is cyclic or mentions unknown events")]
    CyclicDeps,
    #[error("the labelling is not total on the events")]
    PartialLabeling,
}

/// A branching pomset `⟨E, deps, λ, B⟩`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchingPomset {
    events: BTreeSet<EventId>,
    deps: BTreeSet<(EventId, EventId)>,
    labels: BTreeMap<EventId, Action>,
    branching: BranchNode,
}

impl BranchingPomset {
    pub fn empty() -> Self {
        BranchingPomset::default()
    }

    /// Assembles the four components without checking them; see [`Self::validate`].
    pub fn from_parts(
        events: BTreeSet<EventId>,
        deps: BTreeSet<(EventId, EventId)>,
        labels: BTreeMap<EventId, Action>,
        branching: BranchNode,
    ) -> Self {
        BranchingPomset { events, deps, labels, branching }
    }

    /// A pomset whose events are exactly the labelled ones.
    pub fn new(
        labels: BTreeMap<EventId, Action>,
        deps: BTreeSet<(EventId, EventId)>,
        branching: BranchNode,
    ) -> Result<Self, InvariantViolation> {
        let r = BranchingPomset { events: labels.keys().copied().collect(), deps, labels, branching };
        r.validate()?;
        Ok(r)
    }

    pub fn events(&self) -> &BTreeSet<EventId> {
        &self.events
    }

    pub fn deps(&self) -> &BTreeSet<(EventId, EventId)> {
        &self.deps
    }

    pub fn labels(&self) -> &BTreeMap<EventId, Action> {
        &self.labels
    }

    pub fn label(&self, e: EventId) -> Option<&Action> {
        self.labels.get(&e)
    }

    pub fn branching(&self) -> &BranchNode {
        &self.branching
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn choice_count(&self) -> usize {
        self.branching.choice_count()
    }

    /// Checks the structural invariants, reporting the first that fails.
    pub fn validate(&self) -> Result<(), InvariantViolation> {
        let leaves = self.branching.leaves();
        let leaf_set: BTreeSet<_> = leaves.iter().copied().collect();
        if leaf_set.len() != leaves.len() {
            return Err(InvariantViolation::DuplicateEvent);
        }
        if leaf_set != self.events {
            return Err(InvariantViolation::LeafMismatch);
        }
        if self.deps.iter().any(|(a, b)| !self.events.contains(a) || !self.events.contains(b)) {
            return Err(InvariantViolation::CyclicDeps);
        }
        if has_cycle(&self.events, &self.deps) {
            return Err(InvariantViolation::CyclicDeps);
        }
        if self.labels.len() != self.events.len() || self.labels.keys().any(|e| !self.events.contains(e)) {
            return Err(InvariantViolation::PartialLabeling);
        }
        Ok(())
    }

    /// Events that some other event reaches through the dependency relation.
    pub fn strict_predecessors(&self, e: EventId) -> BTreeSet<EventId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![e];
        while let Some(x) = stack.pop() {
            for &(a, b) in &self.deps {
                if b == x && seen.insert(a) {
                    stack.push(a);
                }
            }
        }
        seen.remove(&e);
        seen
    }

    /// Events that are direct children of the root and have no strict predecessor.
    pub fn active_minimal(&self) -> BTreeSet<EventId> {
        self.branching
            .children
            .iter()
            .filter_map(|c| match c {
                Child::Event(e) => Some(*e),
                Child::Choice(..) => None,
            })
            .filter(|e| self.strict_predecessors(*e).is_empty())
            .collect()
    }

    /// `R[B']`: keep only the events that are leaves of `structure`.
    pub fn restrict(&self, structure: BranchNode) -> BranchingPomset {
        let events = structure.leaf_set();
        assert!(events.is_subset(&self.events), "restriction to a structure with unknown events");
        let deps = self
            .deps
            .iter()
            .filter(|(a, b)| events.contains(a) && events.contains(b))
            .copied()
            .collect();
        let labels = self.labels.iter().filter(|(e, _)| events.contains(e)).map(|(e, l)| (*e, l.clone())).collect();
        BranchingPomset { events, deps, labels, branching: structure }
    }

    /// `R - e` for an event sitting directly under the root.
    pub fn remove_event(&self, e: EventId) -> BranchingPomset {
        assert!(self.branching.has_direct_event(e), "{e} is not a direct child of the root");
        self.restrict(self.branching.without_event(e))
    }

    /// Whether the branching structure refines to the empty set.
    pub fn terminates(&self) -> bool {
        self.branching.refines_to_empty()
    }

    /// The transitive closure of the dependency relation (strict pairs only).
    pub fn closure(&self) -> BTreeSet<(EventId, EventId)> {
        let mut out = BTreeSet::new();
        for &e in &self.events {
            for p in self.strict_predecessors(e) {
                out.insert((p, e));
            }
        }
        out
    }

    /// Renumbers events to `start, start+1, ..` in id order.
    pub fn renumbered(&self, start: u32) -> BranchingPomset {
        let map: BTreeMap<EventId, EventId> =
            self.events.iter().enumerate().map(|(i, e)| (*e, EventId(start + i as u32))).collect();
        self.rename(&map)
    }

    pub(crate) fn rename(&self, map: &BTreeMap<EventId, EventId>) -> BranchingPomset {
        fn node(n: &BranchNode, map: &BTreeMap<EventId, EventId>) -> BranchNode {
            BranchNode::new(n.children.iter().map(|c| match c {
                Child::Event(e) => Child::Event(map[e]),
                Child::Choice(l, r) => Child::choice(node(l, map), node(r, map)),
            }))
        }
        BranchingPomset {
            events: self.events.iter().map(|e| map[e]).collect(),
            deps: self.deps.iter().map(|(a, b)| (map[a], map[b])).collect(),
            labels: self.labels.iter().map(|(e, l)| (map[e], l.clone())).collect(),
            branching: node(&self.branching, map),
        }
    }
}

fn has_cycle(events: &BTreeSet<EventId>, deps: &BTreeSet<(EventId, EventId)>) -> bool {
    // Kahn's algorithm.
    let mut indegree: BTreeMap<EventId, usize> = events.iter().map(|e| (*e, 0)).collect();
    for (_, b) in deps {
        *indegree.entry(*b).or_default() += 1;
    }
    let mut ready: Vec<EventId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(e, _)| *e).collect();
    let mut removed = 0;
    while let Some(e) = ready.pop() {
        removed += 1;
        for (a, b) in deps {
            if *a == e {
                let d = indegree.get_mut(b).expect("known event");
                *d -= 1;
                if *d == 0 {
                    ready.push(*b);
                }
            }
        }
    }
    removed != indegree.len()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::chor::parse;
    use crate::encode::{encode, EncodeConfig};

    pub(crate) fn encoded(text: &str) -> BranchingPomset {
        encode(&parse(text, true).unwrap(), &EncodeConfig::default()).unwrap()
    }

    pub(crate) fn event_labelled(r: &BranchingPomset, label: &str) -> EventId {
        let label = Action::parse_label(label).unwrap();
        let found: Vec<_> = r.labels().iter().filter(|(_, l)| **l == label).map(|(e, _)| *e).collect();
        assert_eq!(found.len(), 1, "label {label} not unique");
        found[0]
    }

    pub(crate) fn labels_of(r: &BranchingPomset, events: &BTreeSet<EventId>) -> BTreeSet<String> {
        events.iter().map(|e| r.label(*e).unwrap().to_string()).collect()
    }

    pub(crate) const MW: &str = "(m->w1:t ; w1->m:d) || (m->w2:t ; w2->m:d)";
    pub(crate) const SEQ_CHOICE: &str = "a->b:x ; (b->c:x + b->d:x) ; c->d:x";
    pub(crate) const NESTED: &str = "((a->b:x ; (b->a:x + b->d:x)) + (a->c:x ; (c->a:x + c->d:x))) ; d->a:x";

    fn strs(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn validate_accepts_encoded() {
        assert_eq!(BranchingPomset::empty().validate(), Ok(()));
        let r = encoded(SEQ_CHOICE);
        assert_eq!(r.validate(), Ok(()));
        assert_eq!(r.len(), 8);
        assert_eq!(r.choice_count(), 1);
    }

    #[test]
    fn validate_rejects_each_violation() {
        let a = Action::parse_label("ab!x").unwrap();
        let (e1, e2) = (EventId(1), EventId(2));
        let labels: BTreeMap<_, _> = [(e1, a.clone()), (e2, a.clone())].into();
        let flat = BranchNode::new([Child::Event(e1), Child::Event(e2)]);

        let cyclic = BranchingPomset::new(labels.clone(), [(e1, e2), (e2, e1)].into(), flat.clone());
        assert_eq!(cyclic, Err(InvariantViolation::CyclicDeps));

        let dup = BranchNode::new([
            Child::Event(e1),
            Child::choice(BranchNode::new([Child::Event(e2)]), BranchNode::new([Child::Event(e2)])),
        ]);
        assert_eq!(BranchingPomset::new(labels.clone(), BTreeSet::new(), dup), Err(InvariantViolation::DuplicateEvent));

        let short = BranchNode::new([Child::Event(e1)]);
        assert_eq!(BranchingPomset::new(labels.clone(), BTreeSet::new(), short), Err(InvariantViolation::LeafMismatch));

        let partial = BranchingPomset::from_parts([e1, e2].into(), BTreeSet::new(), [(e1, a)].into(), flat);
        assert_eq!(partial.validate(), Err(InvariantViolation::PartialLabeling));
    }

    #[test]
    fn active_minimal_examples() {
        let mw = encoded(MW);
        assert_eq!(labels_of(&mw, &mw.active_minimal()), strs(&["m w1!t", "m w2!t"]));
        let seq_choice = encoded(SEQ_CHOICE);
        assert_eq!(labels_of(&seq_choice, &seq_choice.active_minimal()), strs(&["ab!x"]));
        assert!(BranchingPomset::empty().active_minimal().is_empty());
    }

    #[test]
    fn remove_event_examples() {
        let mw = encoded(MW);
        let first = event_labelled(&mw, "m w1!t");
        let rest = mw.remove_event(first);
        assert_eq!(rest.len(), 7);
        assert_eq!(rest.validate(), Ok(()));
        assert!(rest.active_minimal().contains(&event_labelled(&mw, "m w1?t")));

        let single = encoded("a b?x");
        let only = *single.events().iter().next().unwrap();
        assert_eq!(single.remove_event(only), BranchingPomset::empty());
    }

    #[test]
    fn restrict_examples() {
        let nested = encoded(NESTED);
        assert_eq!(nested.restrict(nested.branching().clone()), nested);
        assert_eq!(nested.restrict(BranchNode::empty()), BranchingPomset::empty());
    }

    #[test]
    fn restriction_drops_pairs_through_discarded_events() {
        // Closing first would keep ab?x < cd!x after the bc-branch is discarded.
        let seq_choice = encoded(SEQ_CHOICE);
        let cd_send = event_labelled(&seq_choice, "cd!x");
        assert!(seq_choice.strict_predecessors(cd_send).contains(&event_labelled(&seq_choice, "ab?x")));
        let top = enable(&seq_choice, cd_send).unwrap();
        assert!(top.strict_predecessors(cd_send).is_empty());
    }

    #[test]
    fn termination_characterisation() {
        assert!(BranchingPomset::empty().terminates());
        assert!(!encoded("a->b:x").terminates());
        assert!(encoded("a->b:x + 0").terminates());
        assert!(encoded("(a->b:x + 0) || (0 + c->d:x)").terminates());
        assert!(!encoded("(a->b:x + 0) || c->d:x").terminates());
    }
}
