//! The refinement preorder on branching structures, decided by brute-force
//! enumeration. Exponential; meant for small pomsets and as a test oracle.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{BranchNode, BranchingPomset, Child, EventId};

/// Largest structure (in leaves) the enumerations accept by default.
pub const DEFAULT_LEAF_BUDGET: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("budget exceeded: {what} over the limit of {limit}")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub limit: usize,
}

fn check_leaves(node: &BranchNode, budget: usize) -> Result<(), BudgetExceeded> {
    if node.leaf_count() > budget {
        return Err(BudgetExceeded { what: "leaves", limit: budget });
    }
    Ok(())
}

type Memo = HashMap<BranchNode, BTreeSet<BranchNode>>;

/// Every child-set a single child can turn into.
fn child_options(child: &Child, memo: &mut Memo) -> Vec<BTreeSet<Child>> {
    match child {
        Child::Event(e) => vec![[Child::Event(*e)].into()],
        Child::Choice(l, r) => {
            let left = refinements_memo(l, memo);
            let right = refinements_memo(r, memo);
            let mut out = Vec::new();
            // Congr: keep the choice, refine both branches.
            for a in &left {
                for b in &right {
                    out.push([Child::choice(a.clone(), b.clone())].into());
                }
            }
            // Choice (then Trans): splice a refinement of one branch in.
            out.extend(left.iter().map(|n| n.children.clone()));
            out.extend(right.iter().map(|n| n.children.clone()));
            out
        }
    }
}

fn refinements_memo(node: &BranchNode, memo: &mut Memo) -> BTreeSet<BranchNode> {
    if let Some(hit) = memo.get(node) {
        return hit.clone();
    }
    let mut acc: BTreeSet<BTreeSet<Child>> = [BTreeSet::new()].into();
    for child in &node.children {
        let options = child_options(child, memo);
        acc = acc
            .iter()
            .flat_map(|done| {
                options.iter().map(move |opt| done.iter().chain(opt).cloned().collect::<BTreeSet<_>>())
            })
            .collect();
    }
    let out: BTreeSet<BranchNode> = acc.into_iter().map(|children| BranchNode { children }).collect();
    memo.insert(node.clone(), out.clone());
    out
}

/// All `B'` with `node ⊒ B'`, including `node` itself.
pub fn node_refinements(node: &BranchNode, leaf_budget: usize) -> Result<BTreeSet<BranchNode>, BudgetExceeded> {
    check_leaves(node, leaf_budget)?;
    Ok(refinements_memo(node, &mut Memo::new()))
}

/// Whether `refined` is derivable from `original` by the refinement rules.
pub fn refines(original: &BranchNode, refined: &BranchNode) -> bool {
    if !refined.leaf_set().is_subset(&original.leaf_set()) {
        return false;
    }
    refinements_memo(original, &mut Memo::new()).contains(refined)
}

/// Every refinement of `r`, each restricted to its own events.
pub fn all_refinements(r: &BranchingPomset, leaf_budget: usize) -> Result<BTreeSet<BranchingPomset>, BudgetExceeded> {
    Ok(node_refinements(r.branching(), leaf_budget)?.into_iter().map(|b| r.restrict(b)).collect())
}

fn resolutions(node: &BranchNode) -> BTreeSet<BranchNode> {
    let mut acc: BTreeSet<BTreeSet<Child>> = [BTreeSet::new()].into();
    for child in &node.children {
        let options: Vec<BTreeSet<Child>> = match child {
            Child::Event(e) => vec![[Child::Event(*e)].into()],
            Child::Choice(l, r) => resolutions(l).into_iter().chain(resolutions(r)).map(|n| n.children).collect(),
        };
        acc = acc
            .iter()
            .flat_map(|done| options.iter().map(move |opt| done.iter().chain(opt).cloned().collect()))
            .collect();
    }
    acc.into_iter().map(|children| BranchNode { children }).collect()
}

/// The choice-free refinements: the classical set-of-pomsets view.
pub fn complete_resolutions(r: &BranchingPomset, leaf_budget: usize) -> Result<BTreeSet<BranchingPomset>, BudgetExceeded> {
    check_leaves(r.branching(), leaf_budget)?;
    Ok(resolutions(r.branching()).into_iter().map(|b| r.restrict(b)).collect())
}

/// The refinements of `r` in which `e` is active and minimal.
pub fn enabling_refinements(
    r: &BranchingPomset,
    e: EventId,
    leaf_budget: usize,
) -> Result<BTreeSet<BranchingPomset>, BudgetExceeded> {
    Ok(all_refinements(r, leaf_budget)?.into_iter().filter(|x| x.active_minimal().contains(&e)).collect())
}

/// The least-refined members of [`enabling_refinements`]: those with no other
/// enabling refinement strictly above them.
pub fn maximal_enabling_refinements(
    r: &BranchingPomset,
    e: EventId,
    leaf_budget: usize,
) -> Result<Vec<BranchingPomset>, BudgetExceeded> {
    let candidates = enabling_refinements(r, e, leaf_budget)?;
    let mut memo = Memo::new();
    let maximal = candidates
        .iter()
        .filter(|x| {
            !candidates
                .iter()
                .any(|y| y != *x && refinements_memo(y.branching(), &mut memo).contains(x.branching()))
        })
        .cloned()
        .collect();
    Ok(maximal)
}
