use std::collections::BTreeSet;

use super::{enabled_events, fire, BranchingPomset};
use crate::chor::Action;

/// Completed label sequences of a pomset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearisations {
    pub traces: BTreeSet<Vec<Action>>,
    /// Set when enumeration stopped after `max_count` completed runs.
    pub truncated: bool,
}

/// Every label sequence `r →l1 … →ln r'` with `r'` terminated, deduplicated.
///
/// Stops after visiting `max_count` completed runs (counting duplicates).
pub fn linearisations(r: &BranchingPomset, max_count: usize) -> Linearisations {
    let mut out = Linearisations { traces: BTreeSet::new(), truncated: false };
    let mut runs = 0;
    let mut prefix = Vec::new();
    walk(r, &mut prefix, &mut runs, max_count, &mut out);
    out
}

fn walk(r: &BranchingPomset, prefix: &mut Vec<Action>, runs: &mut usize, max: usize, out: &mut Linearisations) {
    if out.truncated {
        return;
    }
    if r.terminates() {
        if *runs >= max {
            out.truncated = true;
            return;
        }
        *runs += 1;
        out.traces.insert(prefix.clone());
    }
    for e in enabled_events(r) {
        let next = fire(r, e).expect("enabled event fires");
        prefix.push(r.label(e).expect("labelled event").clone());
        walk(&next, prefix, runs, max, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pomset::tests::{encoded, MW};

    fn rendered(l: &Linearisations) -> BTreeSet<String> {
        l.traces.iter().map(|t| t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")).collect()
    }

    #[test]
    fn master_workers_has_seventy() {
        let l = linearisations(&encoded(MW), 1_000_000);
        assert!(!l.truncated);
        assert_eq!(l.traces.len(), 70);
    }

    #[test]
    fn single_communication() {
        let l = linearisations(&encoded("a->b:x"), 10);
        assert_eq!(rendered(&l), ["ab!x ab?x".to_string()].into());
    }

    #[test]
    fn both_resolutions_of_a_choice() {
        let l = linearisations(&encoded("a->b:x + a->c:x"), 10);
        assert_eq!(rendered(&l), ["ab!x ab?x".to_string(), "ac!x ac?x".to_string()].into());
    }

    #[test]
    fn skippable_block_has_empty_trace() {
        let l = linearisations(&encoded("a->b:x + 0"), 10);
        assert_eq!(rendered(&l), [String::new(), "ab!x ab?x".to_string()].into());
    }

    #[test]
    fn truncation() {
        let l = linearisations(&encoded(MW), 5);
        assert!(l.truncated);
        assert_eq!(l.traces.len(), 5);
    }
}
