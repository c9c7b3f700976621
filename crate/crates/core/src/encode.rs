//! The pomset interpretation of choreographies.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::chor::{Action, Choreography, Participant};
use crate::pomset::{BranchNode, BranchingPomset, Child, EventId};

/// What to do with loops, whose interpretation is an infinite pomset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopPolicy {
    #[default]
    Reject,
    /// Rewrite every `c*` into `k` nested `(c ; ..) + 0` iterations first.
    Unfold(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodeConfig {
    pub loops: LoopPolicy,
    /// First event id handed out.
    pub fresh_id_start: u32,
}

impl EncodeConfig {
    pub fn unfolding(depth: usize) -> Self {
        EncodeConfig { loops: LoopPolicy::Unfold(depth), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("choreography contains loops; pass an unfolding depth to encode them")]
    LoopsUnsupported,
}

/// Replaces every loop `c*` by `k` unfoldings: `U0 = 0`, `Uj = (c ; U(j-1)) + 0`.
pub fn unfold_loops(c: &Choreography, depth: usize) -> Choreography {
    use Choreography as C;
    match c {
        C::Skip | C::Interaction { .. } | C::PendingReceive { .. } => c.clone(),
        C::Seq(l, r) => C::seq(unfold_loops(l, depth), unfold_loops(r, depth)),
        C::Choice(l, r) => C::choice(unfold_loops(l, depth), unfold_loops(r, depth)),
        C::Par(l, r) => C::par(unfold_loops(l, depth), unfold_loops(r, depth)),
        C::Loop(body) => {
            let body = unfold_loops(body, depth);
            (0..depth).fold(C::Skip, |inner, _| C::choice(C::seq(body.clone(), inner), C::Skip))
        }
    }
}

/// `⟦c⟧`. Event ids come from a counter, left operand first.
pub fn encode(c: &Choreography, cfg: &EncodeConfig) -> Result<BranchingPomset, EncodeError> {
    let unfolded;
    let c = match cfg.loops {
        LoopPolicy::Reject if c.contains_loop() => return Err(EncodeError::LoopsUnsupported),
        LoopPolicy::Reject => c,
        LoopPolicy::Unfold(depth) => {
            unfolded = unfold_loops(c, depth);
            &unfolded
        }
    };
    let mut next = cfg.fresh_id_start;
    Ok(encode_with(c, &mut next))
}

fn fresh(next: &mut u32) -> EventId {
    let id = EventId(*next);
    *next += 1;
    id
}

fn encode_with(c: &Choreography, next: &mut u32) -> BranchingPomset {
    use Choreography as C;
    match c {
        C::Skip => BranchingPomset::empty(),
        C::Interaction { from, to, msg } => {
            let (send, recv) = (fresh(next), fresh(next));
            BranchingPomset::from_parts(
                [send, recv].into(),
                [(send, recv)].into(),
                [
                    (send, Action::send(from.clone(), to.clone(), msg.clone())),
                    (recv, Action::receive(from.clone(), to.clone(), msg.clone())),
                ]
                .into(),
                BranchNode::new([Child::Event(send), Child::Event(recv)]),
            )
        }
        C::PendingReceive { from, to, msg } => {
            let recv = fresh(next);
            BranchingPomset::from_parts(
                [recv].into(),
                BTreeSet::new(),
                [(recv, Action::receive(from.clone(), to.clone(), msg.clone()))].into(),
                BranchNode::new([Child::Event(recv)]),
            )
        }
        C::Seq(l, r) => {
            let l = encode_with(l, next);
            seq_compose(&l, &encode_with(r, next))
        }
        C::Choice(l, r) => {
            let l = encode_with(l, next);
            choice_compose(&l, &encode_with(r, next))
        }
        C::Par(l, r) => {
            let l = encode_with(l, next);
            par_compose(&l, &encode_with(r, next))
        }
        C::Loop(_) => unreachable!("loops are rewritten or rejected before encoding"),
    }
}

type Parts = (BTreeSet<EventId>, BTreeSet<(EventId, EventId)>, BTreeMap<EventId, Action>);

fn union(r1: &BranchingPomset, r2: &BranchingPomset) -> Parts {
    assert!(r1.events().is_disjoint(r2.events()), "composed pomsets share event ids");
    (
        r1.events().union(r2.events()).copied().collect(),
        r1.deps().union(r2.deps()).copied().collect(),
        r1.labels().iter().chain(r2.labels()).map(|(e, l)| (*e, l.clone())).collect(),
    )
}

fn by_subject(r: &BranchingPomset) -> BTreeMap<&Participant, Vec<EventId>> {
    let mut out: BTreeMap<&Participant, Vec<EventId>> = BTreeMap::new();
    for (e, l) in r.labels() {
        out.entry(l.subject()).or_default().push(*e);
    }
    out
}

/// `R1 ; R2`: every event of `r1` precedes every event of `r2` with the same subject.
pub fn seq_compose(r1: &BranchingPomset, r2: &BranchingPomset) -> BranchingPomset {
    let (events, mut deps, labels) = union(r1, r2);
    let later = by_subject(r2);
    for (subject, earlier) in by_subject(r1) {
        if let Some(later) = later.get(subject) {
            for a in &earlier {
                for b in later {
                    deps.insert((*a, *b));
                }
            }
        }
    }
    let branching = BranchNode::new(r1.branching().children.iter().chain(&r2.branching().children).cloned());
    BranchingPomset::from_parts(events, deps, labels, branching)
}

/// `R1 ∥ R2`: componentwise union.
pub fn par_compose(r1: &BranchingPomset, r2: &BranchingPomset) -> BranchingPomset {
    let (events, deps, labels) = union(r1, r2);
    let branching = BranchNode::new(r1.branching().children.iter().chain(&r2.branching().children).cloned());
    BranchingPomset::from_parts(events, deps, labels, branching)
}

/// `R1 + R2`: union of the events under a single choice between the two structures.
pub fn choice_compose(r1: &BranchingPomset, r2: &BranchingPomset) -> BranchingPomset {
    let (events, deps, labels) = union(r1, r2);
    let branching = BranchNode::new([Child::choice(r1.branching().clone(), r2.branching().clone())]);
    BranchingPomset::from_parts(events, deps, labels, branching)
}
