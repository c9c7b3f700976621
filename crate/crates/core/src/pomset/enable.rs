//! Enabling and firing events.
//!
//! To enable `e` the structure is refined as little as possible until `e` is
//! a direct child of the root with no surviving predecessor:
//!
//! 1. every choice on the path from the root to `e` is resolved toward `e`;
//! 2. every direct predecessor of `e` is discarded. A choice whose branches
//!    both survive cleaning is kept; if only one survives it is spliced in.
//!    A predecessor that cannot be discarded means `e` cannot be enabled.
//!
//! Only direct predecessors matter: any path into `e` ends with a direct
//! dependency, so once those are gone `e` is minimal.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{BranchNode, BranchingPomset, Child, EventId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("event {event} cannot be enabled")]
pub struct CannotEnable {
    pub event: EventId,
}

fn resolve_toward(node: &BranchNode, e: EventId) -> BranchNode {
    if node.has_direct_event(e) {
        return node.clone();
    }
    let mut children = BTreeSet::new();
    for child in &node.children {
        match child {
            Child::Choice(l, _) if l.contains_event(e) => children.extend(resolve_toward(l, e).children),
            Child::Choice(_, r) if r.contains_event(e) => children.extend(resolve_toward(r, e).children),
            other => {
                children.insert(other.clone());
            }
        }
    }
    BranchNode { children }
}

/// The least refinement of `node` without any event of `blocked`, if any.
fn clean(node: &BranchNode, blocked: &BTreeSet<EventId>) -> Option<BranchNode> {
    let mut children = BTreeSet::new();
    for child in &node.children {
        match child {
            Child::Event(e) if blocked.contains(e) => return None,
            Child::Event(_) => {
                children.insert(child.clone());
            }
            Child::Choice(l, r) => match (clean(l, blocked), clean(r, blocked)) {
                (Some(l), Some(r)) => {
                    children.insert(Child::choice(l, r));
                }
                (Some(only), None) | (None, Some(only)) => children.extend(only.children),
                (None, None) => return None,
            },
        }
    }
    Some(BranchNode { children })
}

/// `R ⇝e R'`: the least refinement of `r` in which `e` is active and minimal.
pub fn enable(r: &BranchingPomset, e: EventId) -> Result<BranchingPomset, CannotEnable> {
    assert!(r.events().contains(&e), "{e} is not an event of the pomset");
    let resolved = resolve_toward(r.branching(), e);
    let direct: BTreeSet<EventId> = r.deps().iter().filter(|(_, b)| *b == e).map(|(a, _)| *a).collect();
    let cleaned = clean(&resolved, &direct).ok_or(CannotEnable { event: e })?;
    Ok(r.restrict(cleaned))
}

/// `R →e R' - e`.
pub fn fire(r: &BranchingPomset, e: EventId) -> Result<BranchingPomset, CannotEnable> {
    Ok(enable(r, e)?.remove_event(e))
}

/// The events that can be enabled in `r`.
pub fn enabled_events(r: &BranchingPomset) -> BTreeSet<EventId> {
    r.events().iter().copied().filter(|e| enable(r, *e).is_ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomset::tests::{encoded, event_labelled, labels_of, SEQ_CHOICE, NESTED, MW};

    fn strs(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn enable_cd_send_discards_upper_branch() {
        let seq_choice = encoded(SEQ_CHOICE);
        let top = enable(&seq_choice, event_labelled(&seq_choice, "cd!x")).unwrap();
        assert_eq!(labels_of(&top, top.events()), strs(&["ab!x", "ab?x", "bd!x", "bd?x", "cd!x", "cd?x"]));
        assert_eq!(top.choice_count(), 0);
    }

    #[test]
    fn enable_nested_keeps_what_it_can() {
        let nested = encoded(NESTED);
        let middle = enable(&nested, event_labelled(&nested, "ab!x")).unwrap();
        assert_eq!(middle.len(), 8);
        assert_eq!(middle.choice_count(), 1);

        let bottom = enable(&nested, event_labelled(&nested, "da!x")).unwrap();
        assert_eq!(
            labels_of(&bottom, bottom.events()),
            strs(&["ab!x", "ab?x", "ac!x", "ac?x", "ba!x", "ba?x", "ca!x", "ca?x", "da!x", "da?x"])
        );
        assert_eq!(bottom.choice_count(), 1);
    }

    #[test]
    fn fire_examples() {
        let mw = encoded(MW);
        let after = fire(&mw, event_labelled(&mw, "m w1!t")).unwrap();
        assert_eq!(after.len(), 7);
        assert!(after.active_minimal().contains(&event_labelled(&mw, "m w1?t")));

        let seq_choice = encoded(SEQ_CHOICE);
        let cd = event_labelled(&seq_choice, "cd!x");
        let fired = fire(&seq_choice, cd).unwrap();
        assert_eq!(fired, enable(&seq_choice, cd).unwrap().remove_event(cd));
        assert_eq!(fired.len(), 5);

        let cd_recv = event_labelled(&seq_choice, "cd?x");
        assert_eq!(fire(&seq_choice, cd_recv), Err(CannotEnable { event: cd_recv }));
    }

    #[test]
    fn cd_receive_waits_for_bd_receive() {
        let seq_choice = encoded(SEQ_CHOICE);
        let fired = fire(&seq_choice, event_labelled(&seq_choice, "cd!x")).unwrap();
        let cd_recv = event_labelled(&seq_choice, "cd?x");
        assert!(!fired.active_minimal().contains(&cd_recv));
        assert!(fired.strict_predecessors(cd_recv).contains(&event_labelled(&seq_choice, "bd?x")));
    }

    #[test]
    fn enabled_event_sets() {
        let seq_choice = encoded(SEQ_CHOICE);
        // bc!x and bd!x wait for ab?x; cd!x only needs the bc-branch gone.
        assert_eq!(labels_of(&seq_choice, &enabled_events(&seq_choice)), strs(&["ab!x", "cd!x"]));
        assert!(enabled_events(&BranchingPomset::empty()).is_empty());
        let mw = encoded(MW);
        assert_eq!(enabled_events(&mw), mw.active_minimal());
    }
}
